"""Experiment-running command line.

Subcommands: simulate, theta-curve, meanfield, duality-check, percolation,
kdep, compare, couple.  Options come from flags or a TOML/JSON config file
(flags win); IPS_SEED in the environment overrides the seed.  Exit status:
0 success, 1 invariant violation (a counterexample dump is written),
2 configuration error.  Each run writes CSVs, a manifest JSON, and --
unless --no-plot -- a figure per CSV.
"""

import argparse
import json
import os
import sys
import time

import numpy as np


class ConfigError(Exception):
    pass


DEFAULTS = {
    "simulate": dict(model="contact", lam=2.0, d=1, L=101, T=50.0, replicas=200,
                     seed=0, threads=1, beta=1.2, p=0.5, gamma=0.0,
                     density_grid=None, snapshot=False),
    "theta-curve": dict(lambdas="1.0:2.2:0.2", L=201, T=100.0, replicas=400,
                        seed=0, threads=1),
    "meanfield": dict(family="ising", beta=3.0, lam=2.0, b=5.0, s=1.0, d=1.0,
                      a01=0.5, a10=0.5, bifurcation=None, x0=0.1, T=20.0,
                      step=1e-3, seed=0, chain_n=0, replicas=20,
                      metastable=False),
    "duality-check": dict(pair="contact:self", mode="pathwise", q=0.0, sites=20,
                          T=5.0, seeds=200, lam=2.0, gamma=1.0, seed=0),
    "percolation": dict(p=0.7, n=100, replicas=1000, grid=None, seed=0),
    "kdep": dict(field="phiphi", p=0.9, indices=100000, lam=100.0, T=0.1,
                 bins=10, seed=0),
    "compare": dict(lam=10.0, T=0.3, levels=50, width=500, verify_windows=0,
                    seed=0),
    "couple": dict(pair="lambda", lam=1.5, lam2=2.0, L=31, T=5.0, seeds=100,
                   seed=0),
}


def build_parser():
    ap = argparse.ArgumentParser(prog="ipslab",
                                 description="interacting particle system lab")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add(name, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--config", help="TOML or JSON config file")
        p.add_argument("--out", default="ipslab_out", help="output directory")
        p.add_argument("--no-plot", action="store_true", help="skip figures")
        return p

    p = add("simulate", help="run replicas of a named model")
    p.add_argument("--model", choices=["contact", "voter", "voter3d", "glauber2d"])
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--d", type=int)
    p.add_argument("--L", type=int)
    p.add_argument("--T", type=float)
    p.add_argument("--replicas", type=int)
    p.add_argument("--density-grid", dest="density_grid",
                   help="also record occupied fractions on this time grid")
    p.add_argument("--snapshot", action="store_const", const=True,
                   help="dump the final configuration of one replica")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)

    p = add("theta-curve", help="coupled survival curve over a rate grid")
    p.add_argument("--lambdas", help="lo:hi:step or comma list")
    p.add_argument("--L", type=int)
    p.add_argument("--T", type=float)
    p.add_argument("--replicas", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)

    p = add("meanfield", help="ODE flow / fixed points / bifurcation sweep")
    p.add_argument("--family")
    p.add_argument("--beta", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--s", type=float)
    p.add_argument("--d", type=float)
    p.add_argument("--a01", type=float)
    p.add_argument("--a10", type=float)
    p.add_argument("--bifurcation", help="parameter sweep lo:hi:step")
    p.add_argument("--x0", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--chain-n", dest="chain_n", type=int,
                   help="also simulate the reduced chain at this N")
    p.add_argument("--replicas", type=int)
    p.add_argument("--metastable", action="store_const", const=True,
                   help="record magnetization sign-flip epochs (N=50 chain)")
    p.add_argument("--seed", type=int)

    p = add("duality-check", help="pathwise or generator-level duality")
    p.add_argument("--pair", help="contact:self, voter:rw, bran:self, covo:self")
    p.add_argument("--mode", choices=["pathwise", "generator"])
    p.add_argument("--q", type=float)
    p.add_argument("--sites", type=int)
    p.add_argument("--T", type=float)
    p.add_argument("--seeds", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--seed", type=int)

    p = add("percolation", help="oriented percolation survival")
    p.add_argument("--p", type=float)
    p.add_argument("--grid", help="several p values lo:hi:step")
    p.add_argument("--n", type=int)
    p.add_argument("--replicas", type=int)
    p.add_argument("--seed", type=int)

    p = add("kdep", help="K-dependent to i.i.d. domination")
    p.add_argument("--field", choices=["phiphi", "contact"])
    p.add_argument("--p", type=float)
    p.add_argument("--indices", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--bins", type=int)
    p.add_argument("--seed", type=int)

    p = add("compare", help="contact process to oriented percolation")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--levels", type=int)
    p.add_argument("--width", type=int)
    p.add_argument("--verify-windows", dest="verify_windows", type=int)
    p.add_argument("--seed", type=int)

    p = add("couple", help="monotone coupling order assertions")
    p.add_argument("--pair", choices=["lambda", "ann-coal", "coop-doubledeath",
                                      "dim-embed"])
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--lambda2", dest="lam2", type=float)
    p.add_argument("--L", type=int)
    p.add_argument("--T", type=float)
    p.add_argument("--seeds", type=int)
    p.add_argument("--seed", type=int)
    return ap


def load_config(path):
    if path is None:
        return {}
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    text = open(path, "rb").read()
    if path.endswith(".json"):
        return json.loads(text)
    try:
        import tomllib
    except ImportError:       # 3.10: flat key = value files only
        return _parse_flat_toml(text.decode())
    return tomllib.loads(text.decode())


def _parse_flat_toml(text):
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if val.startswith(("'", '"')):
            out[key] = val.strip("'\"")
        elif val in ("true", "false"):
            out[key] = val == "true"
        else:
            try:
                out[key] = int(val)
            except ValueError:
                try:
                    out[key] = float(val)
                except ValueError:
                    raise ConfigError(f"config line {lineno}: bad value {val!r}")
    return out


def resolve(args, cmd):
    """defaults < config file < explicit flags; IPS_SEED overrides seed."""
    cfg = dict(DEFAULTS[cmd])
    cfg.update(load_config(args.config))
    for key, val in vars(args).items():
        if key in ("cmd", "config", "out", "no_plot"):
            continue
        if val is not None:
            cfg[key] = val
    if os.environ.get("IPS_SEED"):
        try:
            cfg["seed"] = int(os.environ["IPS_SEED"])
        except ValueError:
            raise ConfigError("IPS_SEED must be an integer")
    unknown = set(cfg) - set(DEFAULTS[cmd])
    if unknown:
        raise ConfigError(f"unknown option(s) for {cmd}: {sorted(unknown)}")
    return cfg


def parse_grid(spec):
    if spec is None:
        raise ConfigError("missing grid")
    if isinstance(spec, (list, tuple)):
        return [float(v) for v in spec]
    if ":" in spec:
        lo, hi, step = (float(v) for v in spec.split(":"))
        return list(np.arange(lo, hi + step / 2, step))
    return [float(v) for v in spec.split(",")]


def _outpath(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def main(argv=None):
    args = build_parser().parse_args(argv)
    t0 = time.time()
    try:
        cfg = resolve(args, args.cmd)
    except ConfigError as err:
        print(json.dumps({"error": str(err), "code": 2}), file=sys.stderr)
        return 2
    try:
        code = RUNNERS[args.cmd](args, cfg, t0)
    except (ConfigError, ValueError) as err:
        print(json.dumps({"error": str(err), "code": 2}), file=sys.stderr)
        return 2
    return code


def _finish(args, cfg, t0, csvname):
    from . import report
    manifest = csvname.replace(".csv", "_manifest.json")
    report.write_manifest(_outpath(args, manifest), cfg, cfg.get("seed"), t0)
    return manifest


def run_simulate(args, cfg, t0):
    from . import estimators, report
    model = cfg["model"]
    if model == "contact":
        if cfg["d"] != 1:
            raise ConfigError("simulate supports the contact process in d=1")
        row = estimators.survival_estimate(cfg["lam"], cfg["L"], cfg["T"],
                                           cfg["replicas"], cfg["seed"],
                                           threads=cfg["threads"])
        manifest = _finish(args, cfg, t0, "simulate.csv")
        report.write_csv(_outpath(args, "simulate.csv"),
                         ["lambda", "L", "T", "replicas", "theta_hat",
                          "ci_lo", "ci_hi", "truncated_frac"],
                         [(row.lam, row.L, row.T, row.replicas, row.theta_hat,
                           row.ci_lo, row.ci_hi, row.truncated_frac)], manifest)
        if cfg.get("density_grid"):
            grid = parse_grid(cfg["density_grid"])
            curve = estimators.invariant_density(cfg["lam"], cfg["L"], grid,
                                                 cfg["replicas"], "ones",
                                                 cfg["seed"],
                                                 threads=cfg["threads"])
            report.write_csv(_outpath(args, "density.csv"),
                             ["t", "mean", "ci", "extinct_frac"],
                             [(float(t), float(m), float(c), float(e))
                              for t, m, c, e in zip(curve.t, curve.mean,
                                                    curve.ci, curve.extinct_frac)],
                             manifest)
            if not args.no_plot:
                report.plot_density(curve, _outpath(args, "density.png"))
        if not args.no_plot:
            report.plot_theta_curve([row], _outpath(args, "simulate.png"))
    elif model in ("voter", "voter3d"):
        dim = 1 if model == "voter" else 3
        stats = estimators.clustering_stats(dim, cfg["L"], cfg["p"],
                                            [cfg["T"]], cfg["replicas"],
                                            cfg["seed"], cfg["threads"])
        manifest = _finish(args, cfg, t0, "simulate.csv")
        report.write_csv(_outpath(args, "simulate.csv"),
                         ["t", "agreement", "disagreement"],
                         [(s.t, s.agreement, s.disagreement) for s in stats],
                         manifest)
        if cfg.get("snapshot"):
            _write_voter_snapshot(args, cfg, dim, manifest)
        if not args.no_plot:
            report.plot_clusters(stats, _outpath(args, "simulate.png"))
    elif model == "glauber2d":
        est = estimators.magnetization_frozen_boundary(cfg["beta"], cfg["L"],
                                                       cfg["T"], cfg["replicas"],
                                                       cfg["seed"], cfg["threads"])
        manifest = _finish(args, cfg, t0, "simulate.csv")
        row = {"beta": est.beta, "L": est.L, "m_hat": est.m_hat,
               "ci": est.ci, "onsager": est.onsager}
        report.write_csv(_outpath(args, "simulate.csv"),
                         ["beta", "L", "m_hat", "ci", "onsager_value"],
                         [(est.beta, est.L, est.m_hat, est.ci, est.onsager)],
                         manifest)
        if not args.no_plot:
            report.plot_magnetization([row], _outpath(args, "simulate.png"))
    else:
        raise ConfigError(f"unknown model {model!r}")
    return 0


def _write_voter_snapshot(args, cfg, dim, manifest):
    """Final configuration of replica 0 as coordinate + state rows."""
    from . import kernels, lattice, report
    from .rng import kernel_seeds, make_rng
    L = cfg["L"]
    seed = kernel_seeds(cfg["seed"], 1, 19, 0)[0]
    rng = make_rng(cfg["seed"], 23, 0, 0)
    if dim == 1:
        lat = lattice.build_lattice("ring", sides=(L,))
        x0 = (rng.random(L) < cfg["p"]).astype(np.uint8)
        x = kernels.voter_ring_final(L, cfg["T"], seed, x0)
    else:
        lat = lattice.build_lattice("torus", sides=(L, L, L))
        x0 = (rng.random(L ** 3) < cfg["p"]).astype(np.uint8)
        x = kernels.voter3d_final(L, cfg["T"], seed, x0)
    header = [f"x{k}" for k in range(lat.dim)] + ["state"]
    report.write_csv(_outpath(args, "snapshot.csv"), header,
                     lattice.config_rows(lat, x), manifest)


def run_theta_curve(args, cfg, t0):
    from . import estimators, report
    lams = parse_grid(cfg["lambdas"])
    rows = estimators.theta_curve(lams, cfg["L"], cfg["T"], cfg["replicas"],
                                  cfg["seed"], threads=cfg["threads"])
    manifest = _finish(args, cfg, t0, "theta_curve.csv")
    report.write_csv(_outpath(args, "theta_curve.csv"),
                     ["lambda", "theta_hat", "ci_lo", "ci_hi", "truncated_frac"],
                     [(r.lam, r.theta_hat, r.ci_lo, r.ci_hi, r.truncated_frac)
                      for r in rows], manifest)
    if not args.no_plot:
        report.plot_theta_curve(rows, _outpath(args, "theta_curve.png"))
    return 0


_MF_PARAM = {"ising": "beta", "contact": "lam", "coop_death": "b",
             "coop_rw": "b", "biased_voter_death": "s", "np_two_alpha": "a01"}


def run_meanfield(args, cfg, t0):
    from . import meanfield, report
    family = cfg["family"]
    if family not in meanfield.FAMILIES:
        raise ConfigError(f"unknown family {family!r}")
    base = {k: cfg[k] for k in ("beta", "lam", "b", "s", "d", "a01", "a10")}
    if cfg.get("metastable"):
        epochs, grid, path = meanfield.sign_flip_epochs(
            N=50, beta=cfg["beta"], T=cfg["T"], master_seed=cfg["seed"])
        manifest = _finish(args, cfg, t0, "metastable.csv")
        report.write_csv(_outpath(args, "metastable.csv"),
                         ["flip_index", "epoch"],
                         list(enumerate(epochs)), manifest)
        if not args.no_plot:
            report.plot_ode(grid, path, _outpath(args, "metastable.png"))
        return 0
    if cfg.get("bifurcation"):
        pname = _MF_PARAM.get(family)
        if pname is None:
            raise ConfigError(f"no sweep parameter for family {family}")
        rows = []
        for val in parse_grid(cfg["bifurcation"]):
            base[pname] = val
            spec = meanfield.DriftSpec(family, dict(base))
            for fp, stab in meanfield.fixed_points(spec):
                rows.append((val, fp, stab))
        manifest = _finish(args, cfg, t0, "bifurcation.csv")
        report.write_csv(_outpath(args, "bifurcation.csv"),
                         ["parameter", "fixed_point", "stability"], rows, manifest)
        if not args.no_plot:
            report.plot_bifurcation(rows, _outpath(args, "bifurcation.png"),
                                    xlabel=pname)
    else:
        spec = meanfield.DriftSpec(family, dict(base))
        ts, xs = meanfield.integrate_ode(spec, cfg["x0"], cfg["T"], cfg["step"])
        keep = np.linspace(0, len(ts) - 1, min(len(ts), 2001)).astype(int)
        manifest = _finish(args, cfg, t0, "ode.csv")
        report.write_csv(_outpath(args, "ode.csv"), ["t", "ode_value"],
                         [(float(ts[k]), float(xs[k])) for k in keep], manifest)
        chains = None
        if cfg.get("chain_n"):
            grid, paths = meanfield.chain_paths(family, base, cfg["chain_n"],
                                                cfg["x0"], cfg["T"],
                                                cfg["replicas"], cfg["seed"])
            rows = [(float(t), cfg["chain_n"], k, float(paths[k, j]))
                    for k in range(paths.shape[0])
                    for j, t in enumerate(grid)]
            report.write_csv(_outpath(args, "chain.csv"),
                             ["t", "N", "replica", "value"], rows, manifest)
            chains = [(grid, paths[k]) for k in range(min(8, paths.shape[0]))]
        if not args.no_plot:
            report.plot_ode(ts, xs, _outpath(args, "ode.png"), chains=chains)
    return 0


def run_duality_check(args, cfg, t0):
    from . import duality, lattice, models, report
    pair = cfg["pair"]
    L = cfg["sites"]
    if cfg["mode"] == "generator":
        # generators are dense over the full configuration space: the
        # builder raises if 2^sites exceeds the cap
        if pair == "contact:self":
            ring = lattice.build_lattice("ring", sides=(L,))
            model = models.contact(ring, cfg["lam"], 1.0)
            dual = duality.dual_model(model, "additive")
            q = 0.0
        elif pair == "voter:rw":
            ring = lattice.build_lattice("ring", sides=(L,))
            model = models.voter(ring)
            dual = models.coalescing_rw(ring)
            q = 0.0
        elif pair == "covo:self":
            kn = lattice.build_lattice("complete", n=L)
            model = models.contact_voter(kn, cfg["lam"], cfg["gamma"])
            dual = model
            q = cfg["gamma"] / (cfg["gamma"] + cfg["lam"])
        else:
            raise ConfigError(f"unknown pair {pair!r}")
        if cfg["q"]:
            q = cfg["q"]
        G, states = duality.generator_matrix(model)
        Gp, _ = duality.generator_matrix(dual)
        psi = duality.psi_q_matrix(states, q)
        resid = duality.generator_duality_residual(G, Gp, psi)
        manifest = _finish(args, cfg, t0, "duality.csv")
        report.write_csv(_outpath(args, "duality.csv"),
                         ["pair", "mode", "q", "residual", "passed"],
                         [(pair, "generator", q, resid, int(resid < 1e-12))],
                         manifest)
        print(f"generator residual {resid:.3e}")
        return 0 if resid < 1e-12 else 1
    # pathwise
    ring = lattice.build_lattice("ring", sides=(L,))
    if pair == "contact:self":
        model, mode = models.contact(ring, cfg["lam"], 1.0), "additive"
    elif pair == "voter:rw":
        model, mode = models.voter(ring), "additive"
    elif pair == "bran:self":
        model, mode = models.annihilating_branching(ring), "cancellative"
    else:
        raise ConfigError(f"pathwise mode supports contact:self, voter:rw, bran:self")
    rep = duality.pathwise_duality_assert(
        model, mode, cfg["T"], cfg["seeds"],
        lambda rng: lattice.product_config(model.lattice, 0.5, rng),
        lambda rng: lattice.single(model.lattice, rng.integers(L)),
        cfg["seed"])
    manifest = _finish(args, cfg, t0, "duality.csv")
    report.write_csv(_outpath(args, "duality.csv"),
                     ["pair", "mode", "seeds", "passed"],
                     [(pair, mode, rep.n_seeds, int(rep.passed))], manifest)
    if not rep.passed:
        dump = rep.counterexample
        report.write_csv(_outpath(args, "duality_counterexample.csv"),
                         ["time", "map_kind", "s1", "s2", "s3"],
                         [tuple(r) + ("",) * (5 - len(r)) for r in dump["events"]],
                         manifest)
        print(f"pathwise duality violated at seed {dump['seed']}")
        return 1
    print(f"pathwise duality held on {rep.n_seeds} seeds")
    return 0


def run_percolation(args, cfg, t0):
    from . import percolation, report
    ps = parse_grid(cfg["grid"]) if cfg.get("grid") else [cfg["p"]]
    rows = [percolation.percolation_theta(2, p, cfg["n"], cfg["replicas"],
                                          cfg["seed"]) for p in ps]
    manifest = _finish(args, cfg, t0, "percolation.csv")
    report.write_csv(_outpath(args, "percolation.csv"),
                     ["p", "n", "replicas", "survived_fraction", "ci_low",
                      "ci_high"],
                     [(r["p"], r["n"], r["replicas"], r["survived_fraction"],
                       r["ci_low"], r["ci_high"]) for r in rows], manifest)
    if not args.no_plot:
        report.plot_percolation(rows, _outpath(args, "percolation.png"))
    return 0


def run_kdep(args, cfg, t0):
    from . import kdep, report
    if cfg["field"] == "phiphi":
        field = kdep.ProductChainField(cfg["p"], cfg["indices"])
    else:
        blocks = max(1, cfg["indices"] // 2)
        width = min(blocks, 1000)
        levels = max(1, blocks // width)
        field = kdep.ContactBlockField(cfg["lam"], cfg["T"], cfg["bins"],
                                       levels, width)
    res = kdep.kdep_couple(field, cfg["seed"])
    ordered = res.layers_ordered()
    pval = res.chisq_pvalue()
    manifest = _finish(args, cfg, t0, "kdep.csv")
    report.write_csv(_outpath(args, "kdep.csv"),
                     ["field", "p", "K", "r", "p_tilde", "indices",
                      "layers_ordered", "min_conditional", "chisq_pvalue"],
                     [(cfg["field"], res.p, res.K, res.r, res.p_tilde,
                       len(res.chi), int(ordered), res.min_conditional, pval)],
                     manifest)
    if not args.no_plot:
        report.plot_kdep(res, _outpath(args, "kdep.png"))
    print(f"kdep: p={res.p:.4f} p_tilde={res.p_tilde:.4f} "
          f"min_cond={res.min_conditional:.4f} chisq_p={pval:.3f}")
    return 0 if ordered and res.min_conditional >= res.p_tilde - 1e-12 else 1


def run_compare(args, cfg, t0):
    from . import percolation, report
    field = percolation.contact_to_percolation(cfg["lam"], cfg["T"],
                                               cfg["levels"], cfg["width"],
                                               cfg["seed"])
    verified = 0
    for w in range(cfg["verify_windows"]):
        small = percolation.contact_to_percolation(cfg["lam"], cfg["T"], 4, 4,
                                                   cfg["seed"] + 1000 + w)
        verified += percolation.verify_open_bond_paths(small)
    manifest = _finish(args, cfg, t0, "compare.csv")
    report.write_csv(_outpath(args, "compare.csv"),
                     ["lambda", "T", "bonds", "empirical_p", "formula_p",
                      "verified_bonds"],
                     [(cfg["lam"], cfg["T"], 2 * cfg["levels"] * cfg["width"],
                       field.empirical_p(), field.p_theory, verified)], manifest)
    report.write_csv(_outpath(args, "compare_bonds.csv"),
                     ["i1", "i2", "direction", "open"], field.bond_rows(),
                     manifest)
    if not args.no_plot:
        report.plot_compare(field, _outpath(args, "compare.png"))
    gap = abs(field.empirical_p() - field.p_theory)
    print(f"good-event frequency {field.empirical_p():.4f} vs "
          f"formula {field.p_theory:.4f} (gap {gap:.4f})")
    return 0


def run_couple(args, cfg, t0):
    from . import graphical, lattice, report
    from .lattice import build_lattice, ones, product_config, single
    from .rng import make_rng
    L, T = cfg["L"], cfg["T"]
    ring = build_lattice("ring", sides=(L,))
    pair = cfg["pair"]
    if pair == "lambda":
        spec = graphical.coupling_contact_rates(ring, cfg["lam"], cfg["lam2"])
        init = lambda rng: (ones(ring), ones(ring))
    elif pair == "ann-coal":
        spec = graphical.coupling_ann_coal(ring)

        def init(rng):
            xb = product_config(ring, 0.5, rng)
            xa = xb * product_config(ring, 0.7, rng)
            return xa.astype(np.int8), xb
    elif pair == "coop-doubledeath":
        spec = graphical.coupling_coop_doubledeath(ring, cfg["lam"])

        def init(rng):
            xa = product_config(ring, 0.7, rng)
            xb = graphical.adjacent_pairs(xa)
            return xa, xb
    else:
        torus = build_lattice("torus", sides=(L, L))
        spec = graphical.coupling_dim_embed(ring, torus, cfg["lam"])

        def init(rng):
            xa = product_config(ring, 0.5, rng)
            xb = product_config(torus, 0.5, rng)
            for i in range(L):
                xb[torus.site((0, i))] |= xa[i]
            return xa, xb
    bad = None
    res = None
    for s in range(cfg["seeds"]):
        rng = make_rng(cfg["seed"], s)
        x0a, x0b = init(rng)
        res = graphical.coupled_evolve(spec, x0a, x0b, T, rng=rng)
        if not res.ok:
            bad = (s, res)
            break
    manifest = _finish(args, cfg, t0, "couple.csv")
    report.write_csv(_outpath(args, "couple.csv"),
                     ["pair", "seeds", "passed", "violation_seed"],
                     [(pair, cfg["seeds"], int(bad is None),
                       -1 if bad is None else bad[0])], manifest)
    if not args.no_plot and res is not None:
        xa = res.xa if pair != "coop-doubledeath" else graphical.adjacent_pairs(res.xa)
        xb = res.xb if pair != "dim-embed" else res.xb[:L]
        report.plot_couple(xa, xb, _outpath(args, "couple.png"))
    if bad is not None:
        print(f"order violated at seed {bad[0]}, t={bad[1].violation_time}")
        return 1
    print(f"coupling order held on {cfg['seeds']} seeds")
    return 0


RUNNERS = {
    "simulate": run_simulate,
    "theta-curve": run_theta_curve,
    "meanfield": run_meanfield,
    "duality-check": run_duality_check,
    "percolation": run_percolation,
    "kdep": run_kdep,
    "compare": run_compare,
    "couple": run_couple,
}


if __name__ == "__main__":
    sys.exit(main())
