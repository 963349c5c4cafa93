"""Command-line interface.

Subcommands: simulate, ode, period-table, constants, hormander,
invariant-check, decay, tv-decay, xovert, figures.  Series go to CSV, scalar
reports to JSON (with a ``pass`` field where a claim is checked), and a small
dependency-free SVG is written next to figure CSVs.  All randomness derives
from --seed; reruns with the same seed and any --threads value are
byte-identical.  Exit codes: 0 success, 1 failed check, 2 usage error.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import click
import numpy as np

from . import flow, period, rates, spanning, stats, svgplot
from .config import ConfigError, load_model, model_to_dict
from .model import (
    SQRT_PI,
    TWO_PI,
    CircleModel,
    State,
    invariant_measure,
)
from .rng import RngStream
from .sde import (
    SimConfig,
    Trajectory,
    simulate_ensemble,
    snapshot,
    write_snapshot_csv,
    write_trajectory_csv,
)

FLOOR_STREAM = 2**32  # stream id namespace for auxiliary draws


def _fmt(v) -> str:
    return f"{v:.17g}"


def _write_json(path: Path, doc: dict) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _resolve_model(ctx, override: str | None) -> CircleModel:
    """Model from the subcommand --config, falling back to the global one."""
    spec = override if override is not None else ctx.obj.get("config")
    if spec is None:
        raise click.UsageError("a model config is required (--config PATH or 'motivating')")
    try:
        return load_model(spec)
    except ConfigError as exc:
        raise click.UsageError(str(exc))


def _parse_times(text: str) -> list[float]:
    try:
        times = sorted({float(tok) for tok in text.split(",") if tok.strip()})
    except ValueError:
        raise click.UsageError(f"cannot parse time list {text!r}")
    if not times:
        raise click.UsageError("empty time list")
    return times


def _finish(out: Path, doc: dict) -> None:
    ok = bool(doc.get("pass", True))
    click.echo(f"{'PASS' if ok else 'FAIL'}  {out}")
    if not ok:
        raise SystemExit(1)


@click.group()
@click.option("--seed", type=int, default=0, show_default=True, help="Base seed for all randomness.")
@click.option("--threads", type=int, default=1, show_default=True, help="Worker threads for ensembles.")
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", show_default=True)
@click.option("--config", default=None,
              help="Default model config (path or 'motivating') for all subcommands.")
@click.pass_context
def main(ctx, seed, threads, out_dir, config):
    """Numerical laboratory for the self-repelling circle diffusion."""
    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed
    ctx.obj["threads"] = max(1, threads)
    ctx.obj["config"] = config
    ctx.obj["out"] = Path(out_dir)
    ctx.obj["out"].mkdir(parents=True, exist_ok=True)


@main.command()
@click.option("--config", default=None, help="Model config path or 'motivating'.")
@click.option("--t-final", type=float, default=10.0, show_default=True)
@click.option("--dt", type=float, default=1e-3, show_default=True)
@click.option("--record-every", type=int, default=100, show_default=True)
@click.option("--count", type=int, default=1, show_default=True)
@click.option("--init", "init_spec", default="zero", show_default=True,
              help="'zero', 'mu', or comma-separated x,u_1,...,u_2m.")
@click.pass_context
def simulate(ctx, config, t_final, dt, record_every, count, init_spec):
    """Integrate SDE trajectories and write one CSV per trajectory."""
    model = _resolve_model(ctx, config)
    cfg = SimConfig(dt=dt, t_final=t_final, record_every=record_every, seed=ctx.obj["seed"])
    if init_spec == "zero":
        init = State(x=0.0, u=np.zeros(model.dim_u))
    elif init_spec == "mu":
        init = invariant_measure(model)
    else:
        vals = [float(tok) for tok in init_spec.split(",")]
        if len(vals) != 1 + model.dim_u:
            raise click.UsageError("init needs x plus one value per u coordinate")
        init = State(x=vals[0], u=np.array(vals[1:]))
    trajs = simulate_ensemble(model, init, count, cfg, workers=ctx.obj["threads"])
    for i, tr in enumerate(trajs):
        write_trajectory_csv(tr, ctx.obj["out"] / f"trajectory_{i:04d}.csv")
    doc = {"count": count, "t_final": t_final, "dt": dt, "model": model_to_dict(model)}
    out = ctx.obj["out"] / "simulate.json"
    _write_json(out, doc)
    _finish(out, doc)


@main.command()
@click.option("--system", type=click.Choice(flow.SYSTEMS), default="rotated", show_default=True)
@click.option("--coords", type=click.Choice(["rotated", "raw"]), default="rotated",
              show_default=True, help="Output coordinates for full-system paths.")
@click.option("--state", "state_spec", default=None,
              help="Initial state components, comma separated.")
@click.option("--level", type=float, default=None,
              help="Start on the H-level set instead: rotated (0,0,c2), rescaled (0,c1).")
@click.option("--t-final", type=float, default=100.0, show_default=True)
@click.option("--dt", type=float, default=1e-3, show_default=True)
@click.option("--record-every", type=int, default=10, show_default=True)
@click.pass_context
def ode(ctx, system, coords, state_spec, level, t_final, dt, record_every):
    """Integrate the zero-noise flow and report the first-integral drift."""
    if (state_spec is None) == (level is None):
        raise click.UsageError("provide exactly one of --state or --level")
    if level is not None:
        c1, c2 = period.phi_roots(level)
        s0 = (0.0, c1) if system == "rescaled" else (0.0, 0.0, c2)
    else:
        s0 = tuple(float(tok) for tok in state_spec.split(","))
    path_obj = flow.rk4_flow(system, s0, dt, t_final, record_every)
    csv_path = ctx.obj["out"] / "ode_path.csv"
    flow.write_flow_csv(path_obj, csv_path, coords=coords)
    h = path_obj.h_values()
    finite = np.isfinite(h)
    drift = float(np.max(np.abs(h[finite] - h[finite][0]))) if finite.any() else 0.0
    # the drift of the conserved quantity is the built-in error monitor; the
    # raw chart gets a looser budget (and fails honestly if a run leaves the
    # near-strip region, where that chart cannot hold the leaf)
    tol = 1e-4 if system == "full" else 1e-6
    doc = {"system": system, "dt": dt, "t_final": t_final,
           "h_initial": float(h[0]) if math.isfinite(h[0]) else "inf",
           "h_max_drift": drift, "h_drift_tolerance": tol,
           "pass": bool(drift < tol)}
    out = ctx.obj["out"] / "ode.json"
    _write_json(out, doc)
    _finish(out, doc)


@main.command("period-table")
@click.option("--cmin", type=float, default=0.5001, show_default=True)
@click.option("--cmax", type=float, default=20.0, show_default=True)
@click.option("--points", type=int, default=50, show_default=True)
@click.option("--with-ode/--no-ode", default=True, show_default=True,
              help="Also run the event-detection oracle per level.")
@click.pass_context
def period_table(ctx, cmin, cmax, points, with_ode):
    """Tabulate the orbit period against the level of the first integral."""
    if not (0.5 + period.C_MIN_GAP < cmin < cmax):
        raise click.UsageError("need 1/2 < cmin < cmax")
    grid = np.exp(np.linspace(math.log(cmin - 0.5), math.log(cmax - 0.5), points)) + 0.5
    rows = []
    for c in grid:
        q = period.period_quadrature(float(c))
        t_ode = period.period_ode_oracle(float(c)).period if with_ode else math.nan
        rows.append((c, q.c1, q.c2, q.period, t_ode, period.period_lower_bound(float(c)),
                     q.period / TWO_PI))
    csv_path = ctx.obj["out"] / "period_table.csv"
    _write_csv(csv_path, ["c", "c1", "c2", "T_quad", "T_ode", "lower_bound", "T_over_2pi"], rows)
    periods = np.array([r[3] for r in rows])
    lower = np.array([r[5] for r in rows])
    monotone = bool(np.all(np.diff(periods) < 0))
    bounds_ok = bool(np.all((periods > 2 * math.sqrt(2)) & (periods < period.SQRT2_PI)
                            & (periods >= lower)))
    cross_ok = True
    if with_ode:
        t_ode = np.array([r[4] for r in rows])
        cross_ok = bool(np.max(np.abs(t_ode - periods) / periods) < 1e-6)
    doc = {"points": points, "cmin": cmin, "cmax": cmax, "monotone_decreasing": monotone,
           "bounds_ok": bounds_ok, "cross_oracle_ok": cross_ok,
           "pass": monotone and bounds_ok and cross_ok}
    out = ctx.obj["out"] / "period_table.json"
    _write_json(out, doc)
    _finish(out, doc)


@main.command()
@click.option("--config", default=None)
@click.option("--eta", type=float, default=1.0, show_default=True)
@click.option("--sigma", type=float, default=None, help="Rate evaluation noise level (default: model sigma).")
@click.pass_context
def constants(ctx, config, eta, sigma):
    """All displayed decay constants plus the resulting rate, as JSON."""
    model = _resolve_model(ctx, config)
    consts = rates.compute_constants(model)
    sig = model.sigma if sigma is None else sigma
    doc = dict(consts.as_dict())
    doc["model"] = model_to_dict(model)
    doc["eta"] = eta
    if sig > 0:
        lam, kappa1 = rates.decay_rate(consts, eta, sig)
        doc["rate_sigma"] = sig
        doc["rate"] = lam
        doc["kappa1"] = kappa1
        doc["rate_from_eps0_at_model_sigma"] = rates.decay_rate_from_eps0(consts, eta) \
            if model.sigma > 0 else None
        doc["sigma_argmax"] = rates.sigma_argmax(consts)
    doc["pass"] = bool(consts.eps0 < 1.0)
    out = ctx.obj["out"] / "constants.json"
    _write_json(out, doc)
    _finish(out, doc)


@main.command()
@click.option("--config", default=None)
@click.option("--samples", type=int, default=100, show_default=True)
@click.option("--max-order", type=int, default=None)
@click.pass_context
def hormander(ctx, config, samples, max_order):
    """Rank certificate for the derivative span condition."""
    model = _resolve_model(ctx, config)
    report = spanning.check_derivative_span(model, samples=samples, max_order=max_order)
    doc = report.as_dict()
    doc["model"] = model_to_dict(model)
    out = ctx.obj["out"] / "hormander.json"
    _write_json(out, doc)
    _finish(out, doc)


@main.command("invariant-check")
@click.option("--config", default=None)
@click.option("--count", type=int, default=2000, show_default=True)
@click.option("--times", default="1,5,10", show_default=True)
@click.option("--dt", type=float, default=1e-3, show_default=True)
@click.pass_context
def invariant_check(ctx, config, count, times, dt):
    """Start the ensemble from the product measure and test it stays there."""
    model = _resolve_model(ctx, config)
    t_list = _parse_times(times)
    measure = invariant_measure(model)
    stride = max(1, int(round(min(t_list) / dt)))
    cfg = SimConfig(dt=dt, t_final=max(t_list), record_every=stride, seed=ctx.obj["seed"])
    trajs = simulate_ensemble(model, measure, count, cfg, workers=ctx.obj["threads"])
    rows = []
    all_pass = True
    for t in t_list:
        x, u, _ = snapshot(trajs, t)
        gof = stats.marginal_gof(x, u, measure)
        rows.append((t, gof["ks_x"], *gof["ks_u"], gof["critical_1pct"]))
        all_pass &= gof["pass"]
        write_snapshot_csv(x, u, ctx.obj["out"] / f"invariant_snapshot_t{t:g}.csv")
    header = ["t", "ks_x"] + [f"ks_u_{k + 1}" for k in range(model.dim_u)] + ["critical_1pct"]
    _write_csv(ctx.obj["out"] / "invariant_check.csv", header, rows)
    doc = {"count": count, "times": t_list, "dt": dt, "pass": bool(all_pass)}
    out = ctx.obj["out"] / "invariant_check.json"
    _write_json(out, doc)
    _finish(out, doc)


@main.command()
@click.option("--config", default=None)
@click.option("--observable", type=click.Choice(["u1", "u2"]), default="u1", show_default=True)
@click.option("--count", type=int, default=2000, show_default=True)
@click.option("--t-final", type=float, default=30.0, show_default=True)
@click.option("--dt", type=float, default=2e-3, show_default=True)
@click.option("--init-u1", type=float, default=3.0, show_default=True,
              help="Initial displacement of u_1 for the point-mass start.")
@click.option("--eta", type=float, default=1.0, show_default=True)
@click.pass_context
def decay(ctx, config, observable, count, t_final, dt, init_u1, eta):
    """Fit the exponential relaxation rate of an observable gap."""
    model = _resolve_model(ctx, config)
    if model.sigma <= 0:
        raise click.UsageError("decay fitting needs sigma > 0")
    u0 = np.zeros(model.dim_u)
    u0[0] = init_u1
    init = State(x=0.0, u=u0)
    stride = max(1, int(round(1.0 / dt)))
    cfg = SimConfig(dt=dt, t_final=t_final, record_every=stride, seed=ctx.obj["seed"])
    trajs = simulate_ensemble(model, init, count, cfg, workers=ctx.obj["threads"])
    col = 0 if observable == "u1" else 1
    times, gap, se, fit = stats.observable_decay(trajs, lambda x, u: u[:, col], 0.0)
    _write_csv(ctx.obj["out"] / "decay.csv", ["t", "gap", "se"],
               list(zip(times, gap, se)))
    lam_theory, _ = rates.decay_rate(rates.compute_constants(model), eta, model.sigma)
    ok = fit.ok and fit.rate >= lam_theory
    doc = {"observable": observable, "count": count, "fitted_rate": fit.rate,
           "fit_stderr": fit.stderr, "fit_points": fit.n_points,
           "censored": fit.censored, "rate_theory": lam_theory, "eta": eta,
           "pass": bool(ok)}
    out = ctx.obj["out"] / "decay.json"
    _write_json(out, doc)
    _finish(out, doc)


@main.command("tv-decay")
@click.option("--config", default=None)
@click.option("--count", type=int, default=4000, show_default=True)
@click.option("--times", default="1,2,3,4,5,6,7,8,10,15,20,30,50", show_default=True)
@click.option("--dt", type=float, default=2e-3, show_default=True)
@click.option("--bins", type=int, default=8, show_default=True,
              help="Histogram bins per axis for the fitting grid.")
@click.option("--eta", type=float, default=1.0, show_default=True)
@click.pass_context
def tv_decay(ctx, config, count, times, dt, bins, eta):
    """Binned total-variation distance to the product measure over time."""
    model = _resolve_model(ctx, config)
    if model.n_modes != 1:
        raise click.UsageError("total-variation binning is limited to one-mode models")
    t_list = _parse_times(times)
    measure = invariant_measure(model)
    grid = stats.TvGrid(angle_bins=bins, u_bins=bins)
    init = State(x=0.0, u=np.zeros(model.dim_u))
    stride = max(1, int(round(min(t_list) / dt)))
    cfg = SimConfig(dt=dt, t_final=max(t_list), record_every=stride, seed=ctx.obj["seed"])
    trajs = simulate_ensemble(model, init, count, cfg, workers=ctx.obj["threads"])
    # noise floor: same-size exact sample from the measure itself
    gen = RngStream(ctx.obj["seed"], FLOOR_STREAM).generator()
    x_mu, u_mu = measure.sample_batch(gen, count)
    floor = stats.empirical_tv(x_mu, u_mu, measure, grid)
    series = []
    for t in t_list:
        x, u, _ = snapshot(trajs, t)
        series.append(stats.empirical_tv(x, u, measure, grid))
    _write_csv(ctx.obj["out"] / "tv_decay.csv", ["t", "tv", "floor"],
               [(t, v, floor) for t, v in zip(t_list, series)])
    fit = stats.fit_decay_rate(t_list, series, floor, min_points=3)
    lam_theory, _ = rates.decay_rate(rates.compute_constants(model), eta, model.sigma)
    iso = stats.isotonic_decreasing_residual(series)
    ok = fit.ok and fit.rate >= lam_theory
    doc = {"count": count, "bins": bins, "noise_floor": floor,
           "fitted_rate": fit.rate, "fit_points": fit.n_points, "censored": fit.censored,
           "isotonic_residual": iso, "rate_theory": lam_theory, "pass": bool(ok)}
    out = ctx.obj["out"] / "tv_decay.json"
    _write_json(out, doc)
    _finish(out, doc)


@main.command()
@click.option("--config", default=None)
@click.option("--count", type=int, default=64, show_default=True)
@click.option("--t-final", type=float, default=1e4, show_default=True)
@click.option("--dt", type=float, default=1e-2, show_default=True)
@click.option("--threshold", type=float, default=0.05, show_default=True)
@click.pass_context
def xovert(ctx, config, count, t_final, dt, threshold):
    """Terminal unwrapped-angle-over-time statistics for a point-mass start."""
    model = _resolve_model(ctx, config)
    init = State(x=0.0, u=np.zeros(model.dim_u))
    cfg = SimConfig(dt=dt, t_final=t_final,
                    record_every=max(1, int(round(t_final / dt / 1000))), seed=ctx.obj["seed"])
    trajs = simulate_ensemble(model, init, count, cfg, workers=ctx.obj["threads"])
    terminals = stats.terminal_x_over_t(trajs)
    med, se = stats.bootstrap_median_abs(terminals, seed=ctx.obj["seed"])
    _write_csv(ctx.obj["out"] / "xovert.csv", ["trajectory", "x_over_t"],
               list(enumerate(terminals)))
    doc = {"count": count, "t_final": t_final, "median_abs": med,
           "bootstrap_se": se, "threshold": threshold, "pass": bool(med < threshold)}
    out = ctx.obj["out"] / "xovert.json"
    _write_json(out, doc)
    _finish(out, doc)


@main.command()
@click.option("--preset", type=click.Choice(["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"]),
              required=True)
@click.option("--t-final", type=float, default=None, help="Override the preset horizon.")
@click.option("--dt", type=float, default=1e-3, show_default=True)
@click.option("--svg/--no-svg", default=True, show_default=True)
@click.pass_context
def figures(ctx, preset, t_final, dt, svg):
    """Reproduce the standard figures as CSV (and quick-look SVG) files."""
    out_dir = ctx.obj["out"]
    seed = ctx.obj["seed"]
    doc = {"preset": preset}
    if preset in ("fig1", "fig2"):
        horizon = t_final if t_final is not None else (750.0 if preset == "fig1" else 100.0)
        for sigma in (0.1, 1.0, 4.0):
            from .model import motivating_model

            model = motivating_model(sigma=sigma)
            cfg = SimConfig(dt=dt, t_final=horizon,
                            record_every=max(1, int(round(0.1 / dt))), seed=seed)
            tr = simulate_ensemble(model, State(x=0.0, u=np.zeros(2)), 1, cfg)[0]
            U = SQRT_PI * tr.u[:, 0]
            V = SQRT_PI * tr.u[:, 1]
            tag = f"{preset}_sigma{sigma:g}"
            if preset == "fig1":
                _write_csv(out_dir / f"{tag}.csv", ["t", "U", "V"],
                           zip(tr.times, U, V))
                if svg:
                    svgplot.line_plot(out_dir / f"{tag}.svg", [(U, V, f"sigma={sigma:g}")],
                                      title=f"(U, V) trace, T={horizon:g}", x_label="U", y_label="V")
            else:
                _write_csv(out_dir / f"{tag}.csv", ["t", "x", "unwrapped_x"],
                           zip(tr.times, tr.x, tr.unwrapped_x))
                if svg:
                    svgplot.line_plot(out_dir / f"{tag}.svg",
                                      [(tr.times, tr.unwrapped_x, f"sigma={sigma:g}")],
                                      title=f"angle trace, T={horizon:g}", x_label="t", y_label="X")
    elif preset == "fig3":
        horizon = t_final if t_final is not None else 1000.0
        path_uv = flow.rk4_flow("full", (0.0, 0.0, 2.0), dt, horizon,
                                record_every=max(1, int(round(0.1 / dt))))
        X, U, V = path_uv.states.T
        _write_csv(out_dir / "fig3_uv.csv", ["t", "U", "V"], zip(path_uv.times, U, V))
        h = path_uv.h_values()
        doc["h_max_drift"] = float(np.max(np.abs(h - h[0])))
        doc["pass"] = bool(doc["h_max_drift"] < 1e-8)
        horizon_x = min(horizon, 70.0)
        path_x = flow.rk4_flow("full", (0.0, 0.0, 2.0), dt, horizon_x,
                               record_every=max(1, int(round(0.05 / dt))))
        _write_csv(out_dir / "fig3_angle.csv", ["t", "X"],
                   zip(path_x.times, path_x.states[:, 0]))
        if svg:
            svgplot.line_plot(out_dir / "fig3_uv.svg", [(U, V, "")],
                              title=f"(U, V) deterministic trace, T={horizon:g}",
                              x_label="U", y_label="V")
            svgplot.line_plot(out_dir / "fig3_angle.svg",
                              [(path_x.times, path_x.states[:, 0], "")],
                              title=f"deterministic angle, T={horizon_x:g}",
                              x_label="t", y_label="X")
    elif preset == "fig4":
        us = np.linspace(-3.0, 3.0, 201)
        vs = np.linspace(-3.0, 3.0, 201)
        rows = []
        for uu in us:
            for vv in vs:
                rows.append((uu, vv, flow.first_integral_H(uu, vv)))
        _write_csv(out_dir / "fig4_h_grid.csv", ["u", "v", "H"], rows)
        if svg:
            curves = []
            for c in (0.6, 1.0, 2.0, 5.0):
                c1, c2 = period.phi_roots(c)
                v_arc = np.linspace(c1, c2, 400)
                rad = np.maximum(2.0 * (c - (0.5 * v_arc**2 - np.log(v_arc))), 0.0)
                u_arc = np.sqrt(rad)
                curves.append((np.concatenate([u_arc, -u_arc[::-1]]),
                               np.concatenate([v_arc, v_arc[::-1]]), f"c={c:g}"))
            svgplot.line_plot(out_dir / "fig4_levels.svg", curves,
                              title="level sets of H", x_label="u", y_label="v")
    elif preset == "fig5":
        vs = np.linspace(0.05, 5.0, 500)
        phis = [period.phi(float(v)) for v in vs]
        _write_csv(out_dir / "fig5_phi.csv", ["v", "phi"], zip(vs, phis))
        if svg:
            svgplot.line_plot(out_dir / "fig5_phi.svg", [(vs, phis, "")],
                              title="potential phi(v) = v^2/2 - log v", x_label="v", y_label="phi")
    elif preset == "fig6":
        grid = np.exp(np.linspace(math.log(1e-4), math.log(19.5), 80)) + 0.5
        rows = [(c, period.period_quadrature(float(c)).period,
                 period.period_lower_bound(float(c))) for c in grid]
        _write_csv(out_dir / "fig6_period.csv", ["c", "T", "lower_bound"], rows)
        if svg:
            svgplot.line_plot(out_dir / "fig6_period.svg",
                              [([r[0] for r in rows], [r[1] for r in rows], "T(c)")],
                              title="orbit period against the level c", x_label="c", y_label="T")
    out = out_dir / f"{preset}.json"
    _write_json(out, doc)
    _finish(out, doc)


if __name__ == "__main__":
    main()
