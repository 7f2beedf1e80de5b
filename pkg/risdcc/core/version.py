"""
Version lookup for the risdcc package
"""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any

from risdcc import __version__ as _fallback_version
from risdcc.log import logger

__all__ = ["get_version"]


def _read_pyproject_toml() -> dict[str, Any] | None:
    """Read pyproject.toml from the project root when running from a checkout"""
    pyproject_path = Path(__file__).parent.parent.parent / "pyproject.toml"  # risdcc/core/version.py -> root
    if not pyproject_path.exists():
        return None
    try:
        with open(pyproject_path, 'rb') as f:
            data = tomllib.load(f)
    except (OSError, tomllib.TOMLDecodeError) as e:
        logger.warning(f"Could not read pyproject.toml: {e}")
        return None
    if data.get("project", {}).get("name") != "risdcc":
        return None
    return data


def get_version() -> str:
    """Get the current package version"""
    pyproject_data = _read_pyproject_toml()
    if pyproject_data and "version" in pyproject_data.get("project", {}):
        return pyproject_data["project"]["version"]
    return _fallback_version

