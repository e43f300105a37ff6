"""Named example tensors shipped as JSON files under ``data/fixtures``."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .errors import NotFound
from .mps import Mps
from .simps import Simps
from .tensorfile import read_file

FIXTURE_IDS = (
    "aklt-mps",
    "aklt-simps",
    "anomalous-mps",
    "anomalous-simps",
    "cluster-two-site-mps",
    "cluster-x-mps",
    "cluster-z-mps",
    "cluster-z-simps",
    "ghz-mps",
    "ghz-simps",
    "mbqc-simps",
    "nice-mps",
    "nice-simps",
    "rydberg-mps",
    "rydberg-simps",
    "wahl-mps",
    "wahl-simps",
)

# fixtures that describe the same state
PAIRS = (
    ("aklt-mps", "aklt-simps"),
    ("anomalous-mps", "anomalous-simps"),
    ("cluster-z-mps", "cluster-z-simps"),
    ("ghz-mps", "ghz-simps"),
    ("nice-mps", "nice-simps"),
    ("rydberg-mps", "rydberg-simps"),
    ("wahl-mps", "wahl-simps"),
)


def fixture_dir() -> Path:
    return Path(str(resources.files("splitmps") / "data" / "fixtures"))


def fixture_path(fixture_id: str, directory: str | Path | None = None) -> Path:
    base = Path(directory) if directory is not None else fixture_dir()
    path = base / f"{fixture_id}.json"
    if not path.is_file():
        raise NotFound(f"unknown fixture {fixture_id!r}")
    return path


def load_fixture(fixture_id: str, directory: str | Path | None = None) -> Mps | Simps:
    """Tensors of a named fixture.

    Raises:
        NotFound: no file ``<fixture_id>.json`` in the fixture directory.
    """
    obj, _ = read_file(fixture_path(fixture_id, directory))
    return obj


def fixture_metadata(fixture_id: str, directory: str | Path | None = None) -> dict[str, str]:
    _, meta = read_file(fixture_path(fixture_id, directory))
    return meta


def list_fixtures(directory: str | Path | None = None) -> list[str]:
    base = Path(directory) if directory is not None else fixture_dir()
    return sorted(p.stem for p in base.glob("*.json"))
