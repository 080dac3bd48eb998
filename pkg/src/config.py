# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

"""Layered configuration: `yamls/defaults.yaml`, then an optional user YAML, then dotlist overrides."""

import logging
from pathlib import Path
from typing import Optional, Sequence

from omegaconf import DictConfig
from omegaconf import OmegaConf as om

from src.attribution import LookupPolicy
from src.emitter import EmitConfig
from src.runtime.interpreter import RunConfig

__all__ = ["DEFAULTS_PATH", "load_config", "emit_config", "run_config"]

log = logging.getLogger(__name__)

DEFAULTS_PATH = Path(__file__).resolve().parent.parent / "yamls" / "defaults.yaml"


def load_config(path: Optional[str | Path] = None, overrides: Sequence[str] = ()) -> DictConfig:
    with open(DEFAULTS_PATH) as f:
        default_cfg = om.load(f)
    layers = [default_cfg]
    if path is not None:
        with open(path) as f:
            layers.append(om.load(f))
    if overrides:
        layers.append(om.from_dotlist(list(overrides)))
    cfg = om.merge(*layers)
    validate(cfg)
    log.debug(f"Loaded config:\n{om.to_yaml(cfg)}")
    return cfg


def validate(cfg: DictConfig) -> None:
    policy = cfg.run.policy
    if policy not in {p.value for p in LookupPolicy}:
        raise ValueError(f"Not sure how to look up group methods with run.policy={policy}, use static or dynamic")
    # both raise ValueError on bad values
    emit_config(cfg)
    run_config(cfg)
    # `desugar.suffix=` on the command line arrives as None
    if not cfg.desugar.get("suffix"):
        raise ValueError("Not sure how to name desugared files with an empty desugar.suffix")


def emit_config(cfg: DictConfig) -> EmitConfig:
    return EmitConfig(
        indent_width=int(cfg.emit.indent_width),
        include_group_annotations=bool(cfg.emit.include_group_annotations),
    )


def run_config(cfg: DictConfig, policy: Optional[str] = None, entry: Optional[str] = None) -> RunConfig:
    """RunConfig from the `run` section; explicit `policy`/`entry` arguments win over the config."""
    policy = policy if policy is not None else cfg.run.policy
    entry = entry if entry is not None else cfg.run.get("entry", None)
    try:
        policy = LookupPolicy(policy)
    except ValueError:
        raise ValueError(f"Not sure how to look up group methods with policy '{policy}', use static or dynamic")
    return RunConfig.from_entry(entry, policy)
