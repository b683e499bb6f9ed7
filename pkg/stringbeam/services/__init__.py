"""
Services module - experiment configuration, report writers and the lab CLI.
"""

from .experiment_config import (  # noqa: F401
    ExperimentConfig,
    config_from_dict,
    load_config,
)
from .reports import RunReport, write_json, write_text  # noqa: F401
