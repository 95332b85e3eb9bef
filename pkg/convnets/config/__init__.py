from .run_config import RunConfig, parse_run_config, load_run_config
from .run_config import build_run_config, RUN_METADATA_FILE
