"""Command line interface: synth | decode | portfolio | combo | diagnostics.

Every subcommand is deterministic given (inputs, seed, flags) at any ``--jobs``
setting.  Module errors map to distinct exit codes with the error name on
standard error; a missing input file exits with code 3.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .alpha_risk import (
    build_alpha_model,
    combo_stock_weights,
    large_n_gap,
    regression_residual_alpha_weights,
    sharpe_optimal_alpha_weights,
)
from .constraints import decode_via_elimination, discover_constraints, eliminate
from .decoder import decode_arrays
from .errors import AlphaDecodeError, ValidationError
from .linalg import eigen_low_rank
from .panels import (
    load_constraint_matrix,
    load_decoded_returns,
    load_position_tensor,
    load_return_panel,
    load_risk_model,
    save_constraint_matrix,
    save_decoded_returns,
    save_position_tensor,
    save_return_panel,
    save_risk_model,
    save_weight_vector,
    validate_constraints,
    DecodedReturns,
)
from .portfolio import build_phi_diagonal, build_phi_one_factor, stock_weights
from .residuals import (
    build_residual_panel,
    erank,
    regression_weights,
    specific_variance,
    variance_floor,
)
from .synth import SynthConfig, gen_dataset
from .errors import ZeroSpectrum

_FMT = ".17g"

# Converters for --config files (flat key=value lines; flags override).
_CONFIG_TYPES = {
    "returns": str,
    "positions": str,
    "constraints": str,
    "phi": str,
    "expected_returns": str,
    "out": str,
    "out_dir": str,
    "stock_out": str,
    "report": str,
    "elimination_report": str,
    "method": str,
    "weight_mode": str,
    "k_rounding": str,
    "alpha_mode": str,
    "constraint": str,
    "phi_model": str,
    "k": int,
    "jobs": int,
    "seed": int,
    "n_alphas": int,
    "n_stocks": int,
    "total_dates": int,
    "momentum_window": int,
    "tol": float,
    "stock_vol": float,
    "sparsity": float,
    "renormalize": None,  # bool
    "discover_constraints": None,
    "all_dates": None,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    overrides = _load_config(known.config) if known.config else {}

    parser, subparsers = _build_parser()
    for sub in subparsers:
        sub.set_defaults(**overrides)
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: FileNotFound: {exc}", file=sys.stderr)
        return 3
    except AlphaDecodeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


def _load_config(path) -> dict:
    values = {}
    with open(path) as handle:
        for lineno, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ValidationError(f"{path}:{lineno}: expected key=value")
            key, _, raw = stripped.partition("=")
            key = key.strip().replace("-", "_")
            raw = raw.strip()
            if key not in _CONFIG_TYPES:
                raise ValidationError(f"{path}:{lineno}: unknown key {key!r}")
            converter = _CONFIG_TYPES[key]
            if converter is None:
                if raw.lower() not in ("true", "false", "1", "0"):
                    raise ValidationError(
                        f"{path}:{lineno}: expected a boolean for {key!r}"
                    )
                values[key] = raw.lower() in ("true", "1")
            else:
                try:
                    values[key] = converter(raw)
                except ValueError:
                    raise ValidationError(
                        f"{path}:{lineno}: bad value {raw!r} for {key!r}"
                    ) from None
    return values


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="alphadecode",
        description="Extract stock expected returns from alpha expected returns.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command")
    subparsers = []

    def pipeline_flags(sub):
        sub.add_argument("--k", type=int, default=0,
                         help="residual components for the weights; <0 = pick by eRank")
        sub.add_argument("--tol", type=float, default=1e-8,
                         help="relative eigenvalue truncation (default 1e-8)")
        sub.add_argument("--weight-mode", default="cov_kfactor",
                         choices=["plain", "cov_kfactor", "corr_kfactor"])
        sub.add_argument("--k-rounding", default="trunc", choices=["trunc", "round"])
        sub.add_argument("--renormalize", action="store_true",
                         help="rescale position slices to unit L1 instead of rejecting")
        sub.add_argument("--config", help="key=value defaults file; flags override")

    synth = commands.add_parser("synth", help="generate a synthetic instance")
    synth.add_argument("--out-dir", required=False, default=".",
                       help="directory for returns.csv, positions.csv, phi.csv, ...")
    synth.add_argument("--n-alphas", type=int, default=2000)
    synth.add_argument("--n-stocks", type=int, default=50)
    synth.add_argument("--total-dates", type=int, default=31)
    synth.add_argument("--momentum-window", type=int, default=10)
    synth.add_argument("--stock-vol", type=float, default=0.02)
    synth.add_argument("--sparsity", type=float, default=1.0)
    synth.add_argument("--constraint", default="none", choices=["none", "dollar"])
    synth.add_argument("--phi-model", default="diagonal", choices=["diagonal", "onefactor"])
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--config")
    synth.set_defaults(func=cmd_synth)
    subparsers.append(synth)

    dec = commands.add_parser("decode", help="decode stock expected returns")
    dec.add_argument("--returns", required=True)
    dec.add_argument("--positions", required=True)
    group = dec.add_mutually_exclusive_group()
    group.add_argument("--constraints", help="constraint matrix CSV")
    group.add_argument("--discover-constraints", action="store_true",
                       help="recover constraints from the position null space")
    dec.add_argument("--method", default="pca", choices=["pca", "elimination"])
    dec.add_argument("--all-dates", action="store_true",
                     help="slide the window and decode every date with >= 3 dates behind it")
    dec.add_argument("--jobs", type=int, default=1)
    dec.add_argument("--elimination-report", help="audit CSV for the elimination split")
    dec.add_argument("--out", required=True)
    pipeline_flags(dec)
    dec.set_defaults(func=cmd_decode)
    subparsers.append(dec)

    port = commands.add_parser("portfolio", help="Sharpe-maximal stock weights")
    port.add_argument("--expected-returns", required=True,
                      help="decoded returns CSV (stock_id,expected_return)")
    port.add_argument("--phi", required=True, help="stock covariance CSV")
    port.add_argument("--out", required=True)
    port.add_argument("--config")
    port.set_defaults(func=cmd_portfolio)
    subparsers.append(port)

    combo = commands.add_parser(
        "combo", help="alpha-portfolio weights and the optimization-vs-regression gap"
    )
    combo.add_argument("--returns", required=True)
    combo.add_argument("--positions", required=True)
    combo.add_argument("--phi", required=True)
    combo.add_argument("--alpha-mode", default="optimize", choices=["optimize", "residual"])
    combo.add_argument("--out", required=True, help="alpha weights CSV")
    combo.add_argument("--stock-out", help="combined stock weights CSV")
    combo.add_argument("--report", help="also write the report block to this file")
    combo.add_argument("--jobs", type=int, default=1)
    pipeline_flags(combo)
    combo.set_defaults(func=cmd_combo)
    subparsers.append(combo)

    diag = commands.add_parser("diagnostics", help="spectra, eRank, constraints, clustering")
    diag.add_argument("--returns", required=True)
    diag.add_argument("--positions", required=True)
    diag.add_argument("--phi", help="stock covariance CSV (identity if omitted)")
    diag.add_argument("--out-dir", required=True)
    diag.add_argument("--jobs", type=int, default=1)
    pipeline_flags(diag)
    diag.set_defaults(func=cmd_diagnostics)
    subparsers.append(diag)

    return parser, subparsers


def _load_pair(args):
    panel = load_return_panel(args.returns)
    tensor = load_position_tensor(args.positions, renormalize=args.renormalize)
    if panel.alpha_ids != tensor.alpha_ids:
        raise ValidationError(
            "returns and positions files disagree on alpha ids or their order"
        )
    if panel.n_dates != tensor.n_dates:
        raise ValidationError(
            f"returns cover {panel.n_dates} dates, positions {tensor.n_dates}"
        )
    return panel, tensor


def cmd_synth(args) -> int:
    config = SynthConfig(
        n_alphas=args.n_alphas,
        n_stocks=args.n_stocks,
        total_dates=args.total_dates,
        momentum_window=args.momentum_window,
        stock_vol=args.stock_vol,
        constraint=args.constraint,
        seed=args.seed,
        sparsity=args.sparsity,
    )
    data = gen_dataset(config)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_return_panel(data.returns, out / "returns.csv")
    save_position_tensor(data.positions, out / "positions.csv")
    if data.constraints is not None:
        save_constraint_matrix(data.constraints, out / "constraints.csv")
    builder = build_phi_diagonal if args.phi_model == "diagonal" else build_phi_one_factor
    phi = builder(data.market, data.positions.stock_ids)
    save_risk_model(phi, out / "phi.csv")
    print(f"synth: wrote returns/positions/phi under {out}", file=sys.stderr)
    return 0


def _resolve_cli_constraints(args, tensor):
    if args.discover_constraints:
        found = discover_constraints(tensor, args.tol)
        return found if found.n_constraints > 0 else None
    if args.constraints:
        q = load_constraint_matrix(args.constraints, tensor.stock_ids)
        report = validate_constraints(tensor, q, args.tol)
        if not report.passed:
            from .errors import ConstraintViolated

            raise ConstraintViolated(
                f"constraints violated: max residual {report.max_residual:.3e} "
                f"> tol {args.tol:g}"
            )
        return q
    return None


def cmd_decode(args) -> int:
    panel, tensor = _load_pair(args)
    constraints = _resolve_cli_constraints(args, tensor)

    if args.all_dates:
        if args.method != "pca":
            raise ValidationError("--all-dates supports --method pca only")
        return _decode_all_dates(args, panel, tensor)

    if args.method == "elimination":
        if constraints is None:
            raise ValidationError(
                "--method elimination needs --constraints or --discover-constraints"
            )
        if args.elimination_report:
            _write_elimination_report(
                eliminate(tensor, constraints, args.tol), tensor, args.elimination_report
            )
        decoded = decode_via_elimination(
            panel, tensor, constraints,
            k=args.k, tol=args.tol, weight_mode=args.weight_mode, rounding=args.k_rounding,
        )
        print(
            f"decode: method=elimination k_requested={args.k} "
            f"removed={constraints.n_constraints}/{tensor.n_stocks}",
            file=sys.stderr,
        )
    else:
        values, info = decode_arrays(
            panel.values, tensor.values,
            k=args.k, tol=args.tol, weight_mode=args.weight_mode, rounding=args.k_rounding,
        )
        decoded = DecodedReturns(values, tensor.stock_ids)
        line = (
            f"decode: method=pca weight_mode={args.weight_mode} "
            f"k_requested={args.k} k_used={info.k_used} "
            f"retained={info.gram.n_retained}/{tensor.n_stocks}"
        )
        if constraints is not None:
            residual = float(np.abs(constraints.values.T @ values).max())
            line += f" constraint_residual={residual:.3e}"
        print(line, file=sys.stderr)
    save_decoded_returns(decoded, args.out)
    return 0


def _decode_all_dates(args, panel, tensor) -> int:
    n_windows = panel.n_dates - 2
    k_used_box = {}

    def run(start: int) -> np.ndarray:
        values, info = decode_arrays(
            panel.values[:, start:],
            tensor.values[:, :, start:],
            k=args.k, tol=args.tol, weight_mode=args.weight_mode, rounding=args.k_rounding,
        )
        k_used_box[start] = info.k_used
        return values

    jobs = max(1, args.jobs)
    if jobs == 1:
        columns = [run(s) for s in range(n_windows)]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            columns = list(pool.map(run, range(n_windows)))
    with open(args.out, "w", newline="") as handle:
        handle.write("# date_index 1 = most recent date; larger indices are older\n")
        writer = csv.writer(handle)
        writer.writerow(["stock_id"] + [f"s{j + 1}" for j in range(n_windows)])
        for a, stock in enumerate(tensor.stock_ids):
            writer.writerow([stock] + [format(col[a], _FMT) for col in columns])
    print(
        f"decode: all-dates windows={n_windows} jobs={jobs} "
        f"k_used_s1={k_used_box.get(0)}",
        file=sys.stderr,
    )
    return 0


def _write_elimination_report(elim, tensor, path) -> None:
    removed_ids = [tensor.stock_ids[a] for a in elim.removed]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["stock_id", "role"] + [f"chi_{s}" for s in removed_ids])
        for col, a in enumerate(elim.kept):
            writer.writerow(
                [tensor.stock_ids[a], "kept"]
                + [format(elim.chi[mu, col], _FMT) for mu in range(elim.n_removed)]
            )
        for a in elim.removed:
            writer.writerow([tensor.stock_ids[a], "removed"] + [""] * elim.n_removed)


def cmd_portfolio(args) -> int:
    decoded = load_decoded_returns(args.expected_returns)
    phi = load_risk_model(args.phi, decoded.stock_ids)
    weights = stock_weights(decoded, phi)
    save_weight_vector(weights.w, decoded.stock_ids, args.out, "weight")
    print(
        f"portfolio: gross=1 gamma={weights.gamma:.6g} stocks={len(decoded.stock_ids)}",
        file=sys.stderr,
    )
    return 0


def cmd_combo(args) -> int:
    panel, tensor = _load_pair(args)
    phi = load_risk_model(args.phi, tensor.stock_ids)
    residual_panel = build_residual_panel(panel, tensor)
    spec = specific_variance(
        residual_panel, args.k, rounding=args.k_rounding, mode=args.weight_mode
    )
    weights = regression_weights(spec)
    zeta_sq = 1.0 / weights.v
    eta_s1 = panel.values[:, 0]
    positions_s1 = tensor.values[:, :, 0]

    lines = [
        f"mode={args.alpha_mode}",
        f"weight_mode={args.weight_mode}",
        f"k_used={spec.k_used}",
    ]
    if args.alpha_mode == "residual":
        alpha_w = regression_residual_alpha_weights(eta_s1, positions_s1, weights)
        stock_w = combo_stock_weights(positions_s1, alpha_w)
        lines += [
            f"combo_stock_gross={np.abs(stock_w).sum():.12g}",
            f"combo_stock_max_abs={np.abs(stock_w).max():.12g}",
        ]
    else:
        report = large_n_gap(positions_s1, phi, zeta_sq, eta_s1, tol=args.tol)
        alpha_w = sharpe_optimal_alpha_weights(
            build_alpha_model(positions_s1, phi, zeta_sq), eta_s1, tol=args.tol
        )
        stock_w = combo_stock_weights(positions_s1, alpha_w)
        lines.append(report.as_text())

    save_weight_vector(alpha_w.w, tensor.alpha_ids, args.out, "weight", id_column="alpha_id")
    if args.stock_out:
        save_weight_vector(stock_w, tensor.stock_ids, args.stock_out, "weight")
    block = "\n".join(lines)
    print(block)
    if args.report:
        Path(args.report).write_text(block + "\n")
    return 0


def cmd_diagnostics(args) -> int:
    panel, tensor = _load_pair(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    residual_panel = build_residual_panel(panel, tensor)
    spec = specific_variance(
        residual_panel, args.k, rounding=args.k_rounding, mode=args.weight_mode
    )
    weights = regression_weights(spec)

    # Weighted Gram spectrum with the truncation flags.
    from .decoder import weighted_gram

    gram = weighted_gram(tensor.values[:, :, 0], weights, args.tol)
    with open(out / "gram_spectrum.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["index", "eigenvalue", "retained"])
        for j, value in enumerate(gram.eigen.values):
            writer.writerow([j + 1, format(value, _FMT), str(bool(gram.retained[j])).lower()])

    # Residual covariance / correlation spectra and effective ranks.
    erank_lines = [f"m={residual_panel.n_columns - 1}"]
    try:
        cov_eig = eigen_low_rank(residual_panel.values, demean_rows=True)
        _write_spectrum(out / "residual_cov_spectrum.csv", cov_eig.values)
        er = erank(cov_eig.values)
        erank_lines += [
            f"erank_cov={er:.12g}",
            f"k_trunc={int(er)}",
            f"k_round={round(er)}",
        ]
    except ZeroSpectrum:
        erank_lines.append("erank_cov=nan")
    sd = np.sqrt(np.var(residual_panel.values, axis=1, ddof=1))
    safe = sd > 0
    standardized = np.zeros_like(residual_panel.values)
    centered = residual_panel.values - residual_panel.values.mean(axis=1, keepdims=True)
    standardized[safe] = centered[safe] / sd[safe, None]
    try:
        corr_eig = eigen_low_rank(standardized, demean_rows=True)
        _write_spectrum(out / "residual_corr_spectrum.csv", corr_eig.values)
        erank_lines.append(f"erank_corr={erank(corr_eig.values):.12g}")
    except ZeroSpectrum:
        erank_lines.append("erank_corr=nan")
    (out / "erank.txt").write_text("\n".join(erank_lines) + "\n")

    # Constraints recovered from the positions.
    discovered = discover_constraints(tensor, args.tol)
    save_constraint_matrix(discovered, out / "constraints_discovered.csv")

    # Loading concentration (clustering) and per-stock coverage.
    phi = (
        load_risk_model(args.phi, tensor.stock_ids)
        if args.phi
        else None
    )
    positions_s1 = tensor.values[:, :, 0]
    zeta_sq = 1.0 / weights.v
    loadings = positions_s1 @ (phi.cholesky_factor if phi is not None else np.eye(tensor.n_stocks))
    q_diag = ((loadings**2) / zeta_sq[:, None]).sum(axis=0)
    coverage = (np.abs(tensor.values).sum(axis=2) > 0).mean(axis=0)
    with open(out / "clustering.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["stock_id", "q_aa", "coverage_fraction"])
        for a, stock in enumerate(tensor.stock_ids):
            writer.writerow(
                [stock, format(q_diag[a], _FMT), format(coverage[a], _FMT)]
            )

    # Per-alpha stats: universe overlap diagnostic plus the residual-variance
    # versus raw-return-variance comparison.
    support = (np.abs(tensor.values).sum(axis=2) > 0).mean(axis=1)
    eta_var = np.var(panel.values[:, 1:], axis=1, ddof=1)
    with open(out / "alpha_stats.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["alpha_id", "support_fraction", "residual_variance", "returns_variance", "weight"]
        )
        for i, alpha in enumerate(tensor.alpha_ids):
            writer.writerow(
                [
                    alpha,
                    format(support[i], _FMT),
                    format(spec.values[i], _FMT),
                    format(eta_var[i], _FMT),
                    format(weights.v[i], _FMT),
                ]
            )

    flagged = int((~gram.retained).sum())
    print(
        f"diagnostics: flagged_gram_eigenvalues={flagged} "
        f"discovered_constraints={discovered.n_constraints} "
        f"k_used={spec.k_used} floor={variance_floor(spec.values):.3e}",
        file=sys.stderr,
    )
    return 0


def _write_spectrum(path, values) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["index", "eigenvalue"])
        for j, value in enumerate(values):
            writer.writerow([j + 1, format(value, _FMT)])


if __name__ == "__main__":
    sys.exit(main())
