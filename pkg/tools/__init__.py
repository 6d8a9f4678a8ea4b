from .config_tool import ConfigTool, RunConfig
from .csv_formatter import CsvFormatter

__all__ = [
    "ConfigTool",
    "RunConfig",
    "CsvFormatter",
]
