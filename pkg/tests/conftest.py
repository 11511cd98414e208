"""Shared helpers: scripted git repositories for integration tests."""

import subprocess
from pathlib import Path

import pytest


class RepoBuilder:
    """Builds a throwaway git repository commit by commit."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self._git("init", "-q", "-b", "main")
        self._git("config", "user.email", "fixtures@example.com")
        self._git("config", "user.name", "Fixture Builder")
        self.commits: list[str] = []

    def _git(self, *args) -> str:
        proc = subprocess.run(
            ["git", *args], cwd=self.path, capture_output=True, text=True
        )
        if proc.returncode != 0:
            raise RuntimeError(f"git {' '.join(args)} failed: {proc.stderr}")
        return proc.stdout

    def commit(self, files: dict[str, str | None], message: str = "change") -> str:
        """Write/remove the given files and commit; returns the commit hash."""
        for name, content in files.items():
            target = self.path / name
            if content is None:
                target.unlink()
            else:
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_text(content, encoding="utf-8")
        self._git("add", "-A")
        self._git("commit", "-q", "-m", message, "--allow-empty")
        sha = self._git("rev-parse", "HEAD").strip()
        self.commits.append(sha)
        return sha

    def commit_binary(self, name: str, data: bytes, message: str = "binary") -> str:
        (self.path / name).write_bytes(data)
        self._git("add", "-A")
        self._git("commit", "-q", "-m", message)
        sha = self._git("rev-parse", "HEAD").strip()
        self.commits.append(sha)
        return sha


@pytest.fixture
def repo_builder(tmp_path):
    return RepoBuilder(tmp_path / "repo")
