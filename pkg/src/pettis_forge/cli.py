"""Command-line entry point.

    pettis-forge psi validate --config cfg.json [--out r.csv] [--format csv|json]
    pettis-forge build --config cfg.json --out archive.json
    pettis-forge verify <kind> --config cfg.json [--out r.csv] [--seed N]
                        [--samples N] [--format csv|json]

Exit codes: 0 all assertions pass, 1 violations found, 2 usage or config
error.  All campaign randomness derives from the config seed (CLI --seed
overrides it), so identical invocations write byte-identical reports.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import campaigns
from .campaigns import Report
from .carriers import verify_disjointness
from .config import (
    build_campaign_from_config,
    build_model_from_config,
    load_json,
    write_archive,
)
from .continuous import ContinuousModel
from .errors import ConfigError, PettisForgeError
from .pettis import PettisModel
from .psi import SequenceRule, PsiSpec, parse_exponent

_VERIFY_KINDS = (
    campaigns.LOWER_BOUND,
    campaigns.PAIRING,
    campaigns.BLOWUP,
    campaigns.HALFPOWER,
    campaigns.CONTINUOUS,
    campaigns.BOCHNER,
)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pettis-forge")
    sub = parser.add_subparsers(dest="command", required=True)

    psi = sub.add_parser("psi", help="gauge-function tools")
    psi_sub = psi.add_subparsers(dest="psi_command", required=True)
    psi_validate = psi_sub.add_parser("validate", help="run the growth certificate")
    _common_flags(psi_validate)

    build = sub.add_parser("build", help="build a model archive")
    _common_flags(build)

    verify = sub.add_parser("verify", help="run a verification campaign")
    verify_sub = verify.add_subparsers(dest="campaign", required=True)
    for kind in _VERIFY_KINDS:
        _common_flags(verify_sub.add_parser(kind, help=f"{kind} campaign"))
    return parser


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="path to the JSON config")
    p.add_argument("--out", default=None, help="report/archive output path")
    p.add_argument("--seed", type=int, default=None, help="override the campaign seed")
    p.add_argument("--samples", type=int, default=None, help="override the sample count")
    p.add_argument("--format", choices=("csv", "json"), default=None, help="report format")


def _campaign_config(obj: dict, kind: str, args: argparse.Namespace):
    cfg = build_campaign_from_config(obj.get("campaign") or {}, kind=kind)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.samples is not None:
        cfg = replace(cfg, samples=args.samples)
    if args.format is not None:
        cfg = replace(cfg, format=args.format)
    if args.out is not None:
        cfg = replace(cfg, out=args.out)
    return cfg


def _emit(report: Report, cfg) -> int:
    text = report.render(cfg.format)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for line in report.summary_lines():
        print(line)
    return 0 if report.passed else 1


def _run_psi_validate(args: argparse.Namespace) -> int:
    obj = load_json(args.config)
    psi_obj = obj.get("psi") or (obj.get("model") or {}).get("psi")
    if psi_obj is None:
        raise ConfigError("psi validate config needs a 'psi' object")
    spec = PsiSpec.from_json(psi_obj)
    rule = SequenceRule.from_json(obj.get("rule", (obj.get("model") or {}).get("rule", {"kind": "affine"})))
    p = parse_exponent(obj.get("p", spec.p))
    cfg = _campaign_config(obj, campaigns.PSI_VALIDATE, args)
    report = campaigns.run_psi_validate(
        spec,
        p,
        rule,
        cfg,
        n_max=int(obj.get("n_max", 48)),
        r_max=float(obj.get("r_max", 0.95)),
    )
    return _emit(report, cfg)


def _run_build(args: argparse.Namespace) -> int:
    obj = load_json(args.config)
    model_cfg = obj.get("model")
    if not isinstance(model_cfg, dict):
        raise ConfigError("build config needs a 'model' object")
    model = build_model_from_config(model_cfg)
    if isinstance(model, PettisModel):
        report = verify_disjointness(model.carriers)
        if not report.passed:
            raise ConfigError(f"disjointness violated: {report.violations[0]}")
        print(
            f"carriers ok: depth {model.depth}, scheme {model.carriers.scheme}, "
            f"mode {report.mode}"
        )
    out = args.out or "model-archive.json"
    write_archive(model, out)
    print(f"archive written to {out}")
    return 0


def _run_verify(args: argparse.Namespace) -> int:
    obj = load_json(args.config)
    model_cfg = obj.get("model")
    if not isinstance(model_cfg, dict):
        raise ConfigError("verify config needs a 'model' object")
    model = build_model_from_config(model_cfg)
    cfg = _campaign_config(obj, args.campaign, args)
    if args.campaign == campaigns.CONTINUOUS:
        if not isinstance(model, ContinuousModel):
            raise ConfigError("continuous campaign needs a continuous model")
        report = campaigns.run_continuous_campaign(model, cfg)
    else:
        if not isinstance(model, PettisModel):
            raise ConfigError(f"{args.campaign} campaign needs a pettis model")
        runner = {
            campaigns.LOWER_BOUND: campaigns.run_lower_bound_sweep,
            campaigns.PAIRING: campaigns.run_pairing_check,
            campaigns.BLOWUP: campaigns.run_blowup,
            campaigns.HALFPOWER: campaigns.run_halfpower_statistic,
            campaigns.BOCHNER: campaigns.run_bochner_divergence,
        }[args.campaign]
        report = runner(model, cfg)
    return _emit(report, cfg)


def main(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "psi":
            return _run_psi_validate(args)
        if args.command == "build":
            return _run_build(args)
        return _run_verify(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PettisForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:  # pragma: no cover - thin wrapper
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    console_main()
