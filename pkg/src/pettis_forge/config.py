"""JSON configuration and archive handling for the CLI.

Config schema:

    {
      "model": {
        "kind": "pettis" | "continuous",        # default "pettis"
        "psi": {"family": ..., "exponent"|"epsilon"|..., "p": ...},
        "K": 1.0,
        "p": 2.0 | "inf",
        "rule": {"kind": "affine", "a": 1, "b": 0} | {"kind": "list", "list": [...]},
        "depth": 24,
        "carriers": {"scheme": "greedy-gap", "params": {}},
        "archive": "path.json"                  # alternative to the fields above
      },
      "campaign": {"kind": ..., "samples": ..., "seed": ..., ...}
    }

Explicit carrier sets found in a config or archive are treated as untrusted
input: they are verified for disjointness, containment, and positivity
before any model is built on top of them.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Mapping

from .campaigns import CampaignConfig
from .carriers import CarrierFamily, allocate_carriers, verify_disjointness
from .continuous import ContinuousModel, build_continuous_model
from .errors import ConfigError, PettisForgeError
from .pettis import PettisModel, build_model
from .psi import PsiSpec, SequenceRule, parse_exponent


def load_json(path: str | Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return obj


def build_carriers_from_config(obj: Mapping | None, depth: int) -> CarrierFamily:
    obj = dict(obj or {})
    if "sets" in obj:
        family = CarrierFamily.from_json({"depth": obj.get("depth", depth), **obj})
        _require_sound(family)
        return family
    scheme = str(obj.get("scheme", "greedy-gap"))
    return allocate_carriers(depth, scheme, obj.get("params") or {})


def _require_sound(family: CarrierFamily) -> None:
    report = verify_disjointness(family)
    if not report.passed:
        first = report.violations[0]
        raise ConfigError(f"disjointness violated: {first}")


def build_model_from_config(obj: Mapping) -> PettisModel | ContinuousModel:
    if "archive" in obj:
        return load_archive(obj["archive"])
    kind = str(obj.get("kind", "pettis"))
    try:
        psi = PsiSpec.from_json(obj["psi"])
    except KeyError as exc:
        raise ConfigError(f"model config missing {exc}") from exc
    rule = SequenceRule.from_json(obj.get("rule", {"kind": "affine"}))
    K = float(obj.get("K", 1.0))
    depth = int(obj.get("depth", 24))
    if kind == "continuous":
        return build_continuous_model(psi, K=K, rule=rule, depth=depth)
    if kind != "pettis":
        raise ConfigError(f"unknown model kind {kind!r}")
    p = parse_exponent(obj.get("p", psi.p))
    carriers = build_carriers_from_config(obj.get("carriers"), depth)
    return build_model(carriers, psi, K=K, p=p, rule=rule, depth=depth)


def build_campaign_from_config(obj: Mapping, kind: str | None = None) -> CampaignConfig:
    obj = dict(obj or {})
    if kind is not None:
        obj["kind"] = kind
    if "kind" not in obj:
        raise ConfigError("campaign config needs a 'kind'")
    known = {f for f in CampaignConfig.__dataclass_fields__}
    unknown = set(obj) - known
    if unknown:
        raise ConfigError(f"unknown campaign fields: {sorted(unknown)}")
    for key in ("t_grid", "delta_levels"):
        if key in obj:
            obj[key] = tuple(obj[key])
    if "interval" in obj:
        iv = obj["interval"]
        if not (isinstance(iv, (list, tuple)) and len(iv) == 2):
            raise ConfigError(f"campaign interval must be [lo, hi], got {iv!r}")
        obj["interval"] = (float(iv[0]), float(iv[1]))
    try:
        return CampaignConfig(**obj)
    except TypeError as exc:
        raise ConfigError(f"bad campaign config: {exc}") from exc


# ---------------------------------------------------------------------------
# Archives
# ---------------------------------------------------------------------------


def archive_model(model: PettisModel | ContinuousModel) -> dict:
    """Self-contained JSON bundle: config, coefficient table, carriers.

    Carrier sets are included verbatim only below the serializer's part
    budget; the generating (scheme, params, depth) triple is always present
    and reproduces them bit-identically.
    """
    if isinstance(model, ContinuousModel):
        return {
            "kind": "continuous",
            "config": model.config_json(),
            "coefficients": list(model.coeffs),
            "certificate": model.certificate.to_json(),
        }
    return {
        "kind": "pettis",
        "config": model.config_json(),
        "table": model.table.to_json(),
        "carriers": model.carriers.to_json(),
    }


def write_archive(model: PettisModel | ContinuousModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(archive_model(model), fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_archive(path: str | Path) -> PettisModel | ContinuousModel:
    obj = load_json(path)
    kind = obj.get("kind")
    config = obj.get("config")
    if not isinstance(config, Mapping):
        raise ConfigError(f"archive {path} has no model config")
    if kind == "continuous":
        return build_model_from_config(config)
    if kind != "pettis":
        raise ConfigError(f"archive {path} has unknown kind {kind!r}")
    carriers_obj = obj.get("carriers")
    model_cfg = dict(config)
    if isinstance(carriers_obj, Mapping) and carriers_obj.get("sets"):
        model_cfg["carriers"] = dict(carriers_obj)
    model = build_model_from_config(model_cfg)
    table_obj = obj.get("table")
    if isinstance(table_obj, Mapping) and isinstance(model, PettisModel):
        _check_table(model, table_obj, path)
    return model


def _check_table(model: PettisModel, table_obj: Mapping, path: str | Path) -> None:
    levels = table_obj.get("levels")
    if levels is not None and list(levels) != list(model.table.levels):
        raise ConfigError(f"archive {path} table levels disagree with its config")
    coeffs = table_obj.get("coeffs")
    if isinstance(coeffs, Mapping):
        for m_str, c in coeffs.items():
            mine = model.table.coefficient(int(m_str))
            if not math.isclose(mine, float(c), rel_tol=1e-12, abs_tol=1e-300):
                raise ConfigError(
                    f"archive {path} coefficient at level {m_str} disagrees with its config"
                )


__all__ = [
    "load_json",
    "build_model_from_config",
    "build_campaign_from_config",
    "build_carriers_from_config",
    "archive_model",
    "write_archive",
    "load_archive",
    "ConfigError",
    "PettisForgeError",
]
