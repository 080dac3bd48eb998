# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

import os
import sys

# Add folder root to path to allow us to use relative imports regardless of what directory the script is run from
sys.path.append(os.path.dirname(os.path.realpath(__file__)))

try:
    from src.pipeline import ExitCode, check, crosscheck, desugar_program, run_program
    from src.runtime import RunConfig
except ImportError as e:
    raise ImportError("Please make sure to pip install -r requirements.txt to get the requirements for swarmc.") from e

__all__ = ["ExitCode", "check", "crosscheck", "desugar_program", "run_program", "RunConfig"]
