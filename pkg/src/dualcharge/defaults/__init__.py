"""
Bundled experiment configurations
"""

import logging
from importlib import resources
from pathlib import Path

logger = logging.getLogger(__name__)

PRESET_SUFFIX = ".conf"


def presets() -> tuple[str, ...]:
    """
    Names of the bundled presets
    """
    folder = resources.files(__name__).joinpath("presets")
    return tuple(
        sorted(
            item.name.removesuffix(PRESET_SUFFIX)
            for item in folder.iterdir()
            if item.name.endswith(PRESET_SUFFIX)
        )
    )


def preset_path(name: str) -> Path:
    """
    The file of a bundled preset

    :param name: The preset name
    :raises KeyError: For unknown presets
    :return: The path to the configuration file
    """
    if name not in presets():
        msg = f"Unknown preset {name!r}, available: {', '.join(presets())}"
        raise KeyError(msg)

    resource = resources.files(__name__).joinpath("presets", name + PRESET_SUFFIX)
    path = Path(str(resource))
    logger.debug("Resolved preset %s to %s", name, path)
    return path
