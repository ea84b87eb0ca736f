"""Command-line front end.

Subcommands cover the full workflow: ``synth`` writes benchmark data,
``decompose`` fits one decomposition and stores its mode artifacts,
``depend`` reports dependence statistics with optional permutation
nulls, ``sweep-sigma`` traces the regularized kernel statistics across
RBF widths, and ``equiv-check``/``table1`` are self-contained
consistency checks with PASS/FAIL verdicts.

Conventions shared by every subcommand:

* exit 0 on success (including PASS verdicts), 1 when a check ran and
  FAILed, 2 for configuration errors, 3 for data or IO errors;
* errors go to stderr as a single JSON object {"error", "message",
  "flag"} so callers can tell a bad flag from bad data;
* floats are serialized in shortest round-trip form, which together
  with fixed key ordering makes every artifact byte-stable across runs;
* relative output paths are resolved against $KMVA_OUT_DIR when set.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from .data import (
    DataMatrix,
    center_columns,
    load_cube,
    load_matrix_csv,
    save_cube,
    save_matrix,
)
from .decomposition import CCA, MCA, DualCCA, KernelCCA, KernelPCA, RockPCA
from .dependence import (
    STATISTICS,
    dependence_battery,
    permutation_null,
    sigma_sweep,
)
from .exceptions import ConfigError, KmvaError, MalformedHeaderError
from .kernels import (
    center_kernel,
    gamma_from_sigma,
    gram,
    median_pairwise_distance,
    rbf,
)
from .synth import (
    REGIMES,
    ModeSpec,
    PlantedCubeSpec,
    RegimeSpec,
    gen_cube,
    gen_regime,
)

__all__ = ["main", "sst_synth_spec"]

_METHODS = ("mca", "cca", "cca-dual", "kcca", "kpca", "rock-pca")
_PAIRED = ("mca", "cca", "cca-dual", "kcca")
_KERNELIZED = ("kcca", "kpca", "rock-pca")
_EPS_DEFAULT = {"cca": 1e-6, "cca-dual": 1e-6, "kcca": 1e-3}

_TABLE_ROWS = (
    ("pearson", "Pearson's R"),
    ("mca", "MCA"),
    ("cca", "CCA"),
    ("hsic_lin", "HSIC linear"),
    ("hsic_rbf", "HSIC RBF"),
    ("kgv", "kGV"),
    ("kcca", "kCCA"),
)
_KERNEL_ROWS = ("hsic_rbf", "kgv", "kcca")
_MODE_KEYS = frozenset(f.name for f in dataclasses.fields(ModeSpec))


# ---------------------------------------------------------------- plumbing


def _fmt(value):
    """Shortest decimal form that parses back to the identical float."""
    return repr(float(value))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {key: _jsonable(val) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(val) for val in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _ensure_parent(path):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def _write_text(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    _ensure_parent(path)
    with open(path, "w") as fh:
        fh.write(text)


def _dump_json(payload, path=None):
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"
    _write_text(text, path)


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else _fmt(v) for v in row))
    _write_text("\n".join(lines) + "\n", path)


def _resolve_out(path):
    """Resolve a relative output path against $KMVA_OUT_DIR when set."""
    if path is None:
        return None
    base = os.environ.get("KMVA_OUT_DIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


class _Parser(argparse.ArgumentParser):
    """argparse that raises ConfigError instead of exiting itself."""

    def error(self, message):
        flag = None
        if message.startswith("argument "):
            flag = message.split()[1].rstrip(":").split("/")[0]
        else:
            marker = "the following arguments are required: "
            if marker in message:
                flag = message.split(marker, 1)[1].split(",")[0].strip()
        raise ConfigError(message, flag=flag)


# ------------------------------------------------------------------- synth


def cmd_synth_regime(args):
    spec = RegimeSpec(regime=args.kind, n=args.n, noise=args.noise, seed=args.seed)
    x, y = gen_regime(spec)
    _write_csv(_resolve_out(args.out), ("x", "y"), np.column_stack([x, y]))
    return 0


def _parse_cube_spec(path, seed_override):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedHeaderError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise MalformedHeaderError(f"{path}: cube spec must be a JSON object")
    allowed = {"shape", "n", "modes", "noise_fraction", "seed"}
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise MalformedHeaderError(f"{path}: unknown keys {unknown}")
    missing = sorted({"shape", "n", "modes"} - set(raw))
    if missing:
        raise MalformedHeaderError(f"{path}: missing keys {missing}")
    if not isinstance(raw["modes"], list):
        raise MalformedHeaderError(f"{path}: modes must be a list")
    modes = []
    for i, entry in enumerate(raw["modes"]):
        if not isinstance(entry, dict):
            raise MalformedHeaderError(f"{path}: modes[{i}] must be an object")
        bad = sorted(set(entry) - _MODE_KEYS)
        if bad:
            raise MalformedHeaderError(f"{path}: modes[{i}] has unknown keys {bad}")
        if entry.get("center") is not None:
            entry = dict(entry, center=tuple(entry["center"]))
        modes.append(ModeSpec(**entry))
    seed = raw.get("seed", 0) if seed_override is None else seed_override
    return PlantedCubeSpec(
        shape=tuple(int(v) for v in raw["shape"]),
        n=int(raw["n"]),
        modes=tuple(modes),
        noise_fraction=float(raw.get("noise_fraction", 0.0)),
        seed=int(seed),
    )


def cmd_synth_cube(args):
    spec = _parse_cube_spec(args.spec, args.seed)
    planted = gen_cube(spec)
    base = _resolve_out(args.out)
    _ensure_parent(base)
    save_cube(planted.cube, base)
    truth = {
        "shape": list(spec.shape),
        "n": spec.n,
        "seed": spec.seed,
        "noise_fraction": planted.noise_fraction,
        "fractions": planted.fractions,
        "modes": [dataclasses.asdict(mode) for mode in spec.modes],
    }
    _dump_json(truth, base + "_truth.json")
    return 0


# --------------------------------------------------------------- decompose


def sst_synth_spec(seed):
    """Benchmark field in the shape of gridded surface temperatures: a
    dominant seasonal oscillation, a weak warming trend in a different
    region, and a faint irregular mode, plus a sliver of white noise.
    """
    modes = (
        ModeSpec(fraction=0.96, temporal="sinusoid", pattern="gaussian-blob",
                 freq_bin=20, center=(3.0, 3.0), width=2.0),
        ModeSpec(fraction=0.03, temporal="linear-trend", pattern="gaussian-blob",
                 center=(9.0, 9.0), width=2.0),
        ModeSpec(fraction=0.008, temporal="ar1", pattern="dipole",
                 ar_coef=0.9, width=1.5),
    )
    return PlantedCubeSpec(shape=(12, 12), n=240, modes=modes,
                           noise_fraction=0.002, seed=seed)


def _parse_sigma(raw):
    if raw is None or raw == "median":
        return "median"
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"--sigma must be 'median' or a number, got {raw!r}",
                          flag="--sigma") from None
    if value <= 0:
        raise ConfigError("--sigma must be positive", flag="--sigma")
    return value


def _parse_rotate(raw):
    if raw is None:
        return "varimax", 4
    name, _, suffix = raw.partition(":")
    if name not in ("none", "varimax", "promax"):
        raise ConfigError(f"--rotate must be none, varimax or promax[:power], "
                          f"got {raw!r}", flag="--rotate")
    if suffix and name != "promax":
        raise ConfigError("only promax takes a :power suffix", flag="--rotate")
    power = 4
    if suffix:
        try:
            power = int(suffix)
        except ValueError:
            raise ConfigError(f"promax power must be an integer, got {suffix!r}",
                              flag="--rotate") from None
        if power < 1:
            raise ConfigError("promax power must be >= 1", flag="--rotate")
    return name, power


def _build_kernel(m, kernel, sigma, gamma):
    mc = center_columns(m)
    if kernel == "rbf":
        if gamma is None:
            width = (median_pairwise_distance(mc) if sigma == "median"
                     else float(sigma))
            gamma = gamma_from_sigma(width)
        return center_kernel(rbf(mc, gamma))
    return center_kernel(gram(mc))


def cmd_decompose(args):
    given = [flag for flag, value in (("--input", args.input),
                                      ("--cube", args.cube),
                                      ("--preset", args.preset))
             if value is not None]
    if len(given) != 1:
        raise ConfigError("exactly one input source is required: "
                          "--input, --cube or --preset",
                          flag=given[1] if len(given) > 1 else "--input")

    method = args.method
    p = args.p
    cube = None
    mats = []
    if args.preset is not None:
        if args.seed is None:
            raise ConfigError("--preset sst-synth needs --seed", flag="--seed")
        if method is None:
            method = "rock-pca"
        elif method != "rock-pca":
            raise ConfigError("preset sst-synth is a rock-pca benchmark",
                              flag="--method")
        if p is None:
            p = 3
        cube = gen_cube(sst_synth_spec(args.seed)).cube
    elif args.cube is not None:
        if method is None:
            raise ConfigError("--method is required", flag="--method")
        if method not in ("rock-pca", "kpca"):
            raise ConfigError("--cube input fits rock-pca or kpca; paired "
                              "methods need two --input files", flag="--cube")
        cube = load_cube(_resolve_out(args.cube))
    else:
        if method is None:
            raise ConfigError("--method is required", flag="--method")
        want = 2 if method in _PAIRED else 1
        if len(args.input) != want:
            raise ConfigError(f"method {method} takes exactly {want} input "
                              f"file(s), got {len(args.input)}", flag="--input")
        # centering is the first step of every method; raw CSVs are expected
        mats = [center_columns(load_matrix_csv(path)) for path in args.input]

    if p is not None and p < 1:
        raise ConfigError("--p must be >= 1", flag="--p")

    kernel = args.kernel
    if kernel is not None and method not in _KERNELIZED:
        raise ConfigError(f"--kernel does not apply to {method}", flag="--kernel")
    if kernel is None:
        kernel = "linear"
    if args.gamma is not None and args.sigma is not None:
        raise ConfigError("--sigma and --gamma are mutually exclusive",
                          flag="--gamma")
    if kernel != "rbf":
        for flag, value in (("--sigma", args.sigma), ("--gamma", args.gamma)):
            if value is not None:
                raise ConfigError(f"{flag} requires --kernel rbf", flag=flag)
    if args.gamma is not None and args.gamma <= 0:
        raise ConfigError("--gamma must be positive", flag="--gamma")
    sigma = _parse_sigma(args.sigma)

    eps = args.eps
    if eps is not None and method not in _EPS_DEFAULT:
        raise ConfigError(f"--eps does not apply to {method}", flag="--eps")
    if eps is None:
        eps = _EPS_DEFAULT.get(method)

    if args.rotate is not None and method != "rock-pca":
        raise ConfigError("--rotate applies to rock-pca only", flag="--rotate")
    rotate, promax_power = _parse_rotate(args.rotate)

    try:
        est = _fit_estimator(method, mats, cube, p, kernel, sigma, args.gamma,
                             eps, rotate, promax_power)
    except ValueError as exc:
        if "n_components" in str(exc):
            raise ConfigError(str(exc), flag="--p") from exc
        raise

    if args.out is not None:
        outdir = _resolve_out(args.out)
    else:
        outdir = os.environ.get("KMVA_OUT_DIR", ".")
    _write_decompose(est, method, outdir, kernel, eps, rotate)
    return 0


def _fit_estimator(method, mats, cube, p, kernel, sigma, gamma, eps,
                   rotate, promax_power):
    if method == "mca":
        return MCA(n_components=p).fit(mats[0], mats[1])
    if method == "cca":
        return CCA(n_components=p, eps=eps).fit(mats[0], mats[1])
    if method == "cca-dual":
        return DualCCA(n_components=p, eps=eps).fit(mats[0], mats[1])
    if method == "kcca":
        ka = _build_kernel(mats[0], kernel, sigma, gamma)
        kb = _build_kernel(mats[1], kernel, sigma, gamma)
        return KernelCCA(n_components=p, eps=eps).fit(ka, kb)
    if method == "kpca":
        m = mats[0] if mats else cube.to_matrix()
        return KernelPCA(n_components=p).fit(_build_kernel(m, kernel, sigma, gamma))
    est = RockPCA(n_components=2 if p is None else p, kernel=kernel, sigma=sigma,
                  gamma=gamma, rotate=rotate, promax_power=promax_power)
    return est.fit(cube if cube is not None else mats[0])


def _write_decompose(est, method, outdir, kernel, eps, rotate):
    os.makedirs(outdir, exist_ok=True)
    artifacts = {}

    def put(name, values):
        save_matrix(values, os.path.join(outdir, name))
        artifacts[name] = [name + ".json", name + ".bin"]

    if method in _PAIRED:
        put("loadings_a", est.loadings_a_)
        put("loadings_b", est.loadings_b_)
        put("temporal_a", est.temporal_a_)
        put("temporal_b", est.temporal_b_)
        n = est.temporal_a_.shape[0]
    elif method == "kpca":
        put("coefficients", est.coefficients_)
        put("temporal", est.temporal_)
        n = est.temporal_.shape[0]
    else:
        put("temporal", est.scores_)
        put("spatial", est.spatial_)
        put("amplitude", est.amplitude_)
        put("phase", est.phase_)
        n = est.scores_.shape[0]
    if method == "cca-dual":
        put("primal_loadings_a", est.primal_loadings_a_)
        put("primal_loadings_b", est.primal_loadings_b_)

    report = {
        "method": method,
        "n": int(n),
        "p": int(est.n_components_),
        "values": est.values_,
        "explained_fraction": est.explained_fraction_,
        "artifacts": artifacts,
    }
    if method in _EPS_DEFAULT:
        report["eps"] = eps
    if method in _KERNELIZED:
        report["kernel"] = kernel
    if method == "kcca":
        report["regularized_values"] = est.regularized_values_
    if method == "rock-pca":
        report["sigma"] = est.sigma_
        report["gamma"] = est.gamma_
        report["rotate"] = rotate
        rot = est.rotation_
        report["rotation"] = None if rot is None else {
            "criterion_trace": rot.criterion_trace,
            "converged": rot.converged,
            "power": rot.power,
        }
    _dump_json(report, os.path.join(outdir, "modes.json"))


# ------------------------------------------------------------------ depend


def _paired_input(paths):
    if len(paths) == 1:
        m = load_matrix_csv(paths[0])
        if m.d != 2:
            raise ConfigError(
                f"a single input file must have exactly two columns, got {m.d}; "
                "pass two files for multivariate sides", flag="--input")
        return m.values[:, :1], m.values[:, 1:]
    if len(paths) == 2:
        a, b = (load_matrix_csv(path) for path in paths)
        return a.values, b.values
    raise ConfigError("--input takes one or two CSV files", flag="--input")


def cmd_depend(args):
    if args.perm < 0:
        raise ConfigError("--perm must be >= 0", flag="--perm")
    if args.perm > 0 and args.seed is None:
        raise ConfigError("--perm needs --seed for a reproducible null",
                          flag="--seed")
    x, y = _paired_input(args.input)
    if args.stat == "all":
        reports = dependence_battery(x, y, n_perm=args.perm,
                                     seed=0 if args.seed is None else args.seed,
                                     eps_linear=args.eps_linear,
                                     eps_rbf=args.eps_rbf)
    else:
        base = dependence_battery(x, y, eps_linear=args.eps_linear,
                                  eps_rbf=args.eps_rbf)
        if args.stat not in base:
            raise ConfigError(f"--stat {args.stat} needs univariate sides",
                              flag="--stat")
        report = base[args.stat]
        if args.perm > 0:
            quantiles = permutation_null(args.stat, x, y, args.perm, args.seed,
                                         eps_linear=args.eps_linear,
                                         eps_rbf=args.eps_rbf)
            report = dataclasses.replace(report, null_quantiles=quantiles,
                                         n_permutations=args.perm)
        reports = {args.stat: report}
    payload = {
        "n": int(x.shape[0]),
        "n_permutations": args.perm,
        "seed": args.seed,
        "statistics": {name: dataclasses.asdict(rep)
                       for name, rep in reports.items()},
    }
    _dump_json(payload, _resolve_out(args.out))
    return 0


# ------------------------------------------------------------- sweep-sigma


def _sigma_grid(x, y, points):
    scale = 0.5 * (median_pairwise_distance(np.asarray(x, dtype=float))
                   + median_pairwise_distance(np.asarray(y, dtype=float)))
    return np.geomspace(1e-3, 1e3, points) * scale


def cmd_sweep_sigma(args):
    if args.points < 2:
        raise ConfigError("--points must be >= 2", flag="--points")
    pairs = []
    if args.preset == "fig1":
        if args.input is not None:
            raise ConfigError("--preset fig1 generates its own data; drop --input",
                              flag="--input")
        if args.seed is None:
            raise ConfigError("--preset fig1 needs --seed", flag="--seed")
        for regime in REGIMES:
            x, y = gen_regime(RegimeSpec(regime=regime, n=args.n, seed=args.seed))
            pairs.append((regime, x, y))
    elif args.input is not None:
        a, b = (load_matrix_csv(path) for path in args.input)
        pairs.append(("pair", a.values, b.values))
    else:
        raise ConfigError("pass --input a.csv b.csv or --preset fig1",
                          flag="--input")

    rows = []
    for label, x, y in pairs:
        sweep = sigma_sweep(x, y, _sigma_grid(x, y, args.points), eps=args.eps)
        for i in range(sweep.sigmas.size):
            rows.append((label, sweep.sigmas[i], sweep.kgv[i], sweep.kcca[i],
                         sweep.kgv_linear, sweep.kcca_linear))
    header = ("label", "sigma", "kgv", "kcca", "kgv_linear", "kcca_linear")
    _write_csv(_resolve_out(args.out), header, rows)
    return 0


# ------------------------------------------------------------- equiv-check


def _equiv_data(seed, n, da, db):
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    m = min(da, db)
    shared = rng.standard_normal((n, m))
    a = rng.standard_normal((n, da))
    b = rng.standard_normal((n, db))
    a[:, :m] += shared
    b[:, :m] += shared
    return a, b


def cmd_equiv_check(args):
    if args.input is not None:
        a, b = (load_matrix_csv(path).values for path in args.input)
    else:
        if args.seed is None:
            raise ConfigError("--seed is required when no --input files are given",
                              flag="--seed")
        if args.n < 4:
            raise ConfigError("--n must be >= 4", flag="--n")
        if min(args.da, args.db) < 1:
            raise ConfigError("--da and --db must be >= 1", flag="--da")
        a, b = _equiv_data(args.seed, args.n, args.da, args.db)
    n = a.shape[0]
    p = min(a.shape[1], b.shape[1], n - 1)
    eps_dual = args.eps if args.eps_dual is None else args.eps_dual

    ac, bc = center_columns(a), center_columns(b)
    routes = {
        "cca": CCA(n_components=p, eps=args.eps).fit(ac, bc).values_,
        "cca_dual": DualCCA(n_components=p, eps=eps_dual).fit(ac, bc).values_,
    }
    ka, kb = (center_kernel(gram(m)) for m in (ac, bc))
    routes["kcca_linear"] = KernelCCA(n_components=p, eps=eps_dual).fit(ka, kb).values_

    names = sorted(routes)
    deviation = max(
        float(np.max(np.abs(routes[u] - routes[v])))
        for i, u in enumerate(names) for v in names[i + 1:]
    )
    verdict = "PASS" if deviation < args.tol else "FAIL"
    payload = {
        "n": int(n),
        "d_a": int(a.shape[1]),
        "d_b": int(b.shape[1]),
        "p": int(p),
        "eps": args.eps,
        "eps_dual": eps_dual,
        "threshold": args.tol,
        "max_deviation": deviation,
        "correlations": routes,
        "verdict": verdict,
    }
    if verdict == "FAIL":
        if eps_dual != args.eps:
            payload["explanation"] = (
                f"the dual and kernel routes ran at eps={_fmt(eps_dual)} while "
                f"the primal route ran at eps={_fmt(args.eps)}; the three routes "
                "agree only under matching regularization")
        else:
            payload["explanation"] = (
                f"route correlations disagree by {_fmt(deviation)}, above the "
                f"{_fmt(args.tol)} threshold")
    _dump_json(payload)
    return 0 if verdict == "PASS" else 1


# ------------------------------------------------------------------ table1


def cmd_table1(args):
    if args.perm < 1:
        raise ConfigError("--perm must be >= 1", flag="--perm")
    if args.n < 50:
        sys.stderr.write(f"warning: n={args.n} is under-sampled; permutation "
                         "quantiles are unstable below n=50\n")

    columns = {}
    for regime in REGIMES:
        x, y = gen_regime(RegimeSpec(regime=regime, n=args.n, seed=args.seed))
        columns[regime] = dependence_battery(x, y, n_perm=args.perm,
                                             seed=args.perm_seed)

    expected = {
        "linear": {name: True for name, _ in _TABLE_ROWS},
        "ring": {name: name in _KERNEL_ROWS for name, _ in _TABLE_ROWS},
        "independent": {name: False for name, _ in _TABLE_ROWS},
    }
    label_width = max(len(label) for _, label in _TABLE_ROWS)
    cell_width = 20
    header = "".join([f"{'statistic':<{label_width}}"]
                     + [f"  {regime:>{cell_width}}" for regime in REGIMES])
    lines = [header, "-" * len(header)]
    mismatches = []
    for name, label in _TABLE_ROWS:
        cells = [f"{label:<{label_width}}"]
        for regime in REGIMES:
            rep = columns[regime][name]
            q95 = rep.null_quantiles["q95"]
            # pearson keeps its sign; the null is over |r|, so compare |value|
            observed = abs(rep.value) if name == "pearson" else rep.value
            detected = observed > q95
            cell = f"{rep.value:.4f} ({q95:.4f}){'*' if detected else ' '}"
            cells.append(f"  {cell:>{cell_width}}")
            if detected != expected[regime][name]:
                state = "detected" if detected else "missed"
                mismatches.append(f"{name}/{regime} ({state})")
        lines.append("".join(cells))
    lines.append(f"* above the q95 of {args.perm} permutations "
                 f"(data seed {args.seed}, permutation seed {args.perm_seed})")
    verdict = "PASS" if not mismatches else "FAIL"
    if mismatches:
        lines.append(f"pattern: FAIL ({'; '.join(mismatches)})")
    else:
        lines.append("pattern: PASS (linear: all detected; ring: RBF-kernel "
                     "statistics only; independent: none)")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0 if verdict == "PASS" else 1


# -------------------------------------------------------------------- main


def _build_parser():
    parser = _Parser(
        prog="kmva",
        description="Kernel multivariate analysis toolbox: synthetic "
                    "benchmarks, decompositions, dependence statistics.",
        epilog="Relative output paths are resolved against $KMVA_OUT_DIR "
               "when it is set.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    synth = sub.add_parser("synth", help="generate benchmark datasets")
    what = synth.add_subparsers(dest="what", required=True, metavar="what")
    regime = what.add_parser("regime", help="paired 1-D series")
    regime.add_argument("--kind", required=True, choices=REGIMES)
    regime.add_argument("--n", type=int, default=400)
    regime.add_argument("--seed", type=int, required=True)
    regime.add_argument("--noise", type=float, default=None,
                        help="noise scale (default depends on --kind)")
    regime.add_argument("--out", required=True, help="CSV path (columns x,y)")
    regime.set_defaults(func=cmd_synth_regime)
    cube = what.add_parser("cube", help="planted space-time field")
    cube.add_argument("--spec", required=True,
                      help="JSON file: shape, n, modes, noise_fraction, seed")
    cube.add_argument("--seed", type=int, default=None,
                      help="override the seed in the spec file")
    cube.add_argument("--out", required=True,
                      help="output base path (writes .json/.bin and _truth.json)")
    cube.set_defaults(func=cmd_synth_cube)

    dec = sub.add_parser("decompose",
                         help="fit one decomposition and write mode artifacts")
    dec.add_argument("--method", choices=_METHODS)
    dec.add_argument("--input", nargs="+", metavar="CSV",
                     help="one or two time-by-space CSV files")
    dec.add_argument("--cube", help="datacube base path (rock-pca or kpca)")
    dec.add_argument("--preset", choices=("sst-synth",),
                     help="built-in rock-pca benchmark field")
    dec.add_argument("--seed", type=int, help="preset data seed")
    dec.add_argument("--p", type=int, help="components kept")
    dec.add_argument("--kernel", choices=("linear", "rbf"))
    dec.add_argument("--sigma", help="'median' or a positive RBF length scale")
    dec.add_argument("--gamma", type=float, help="direct RBF width")
    dec.add_argument("--eps", type=float, help="regularization (cca, cca-dual, kcca)")
    dec.add_argument("--rotate", help="none, varimax, or promax:<power> (rock-pca)")
    dec.add_argument("--out", help="output directory (default $KMVA_OUT_DIR or .)")
    dec.set_defaults(func=cmd_decompose)

    dep = sub.add_parser("depend",
                         help="dependence statistics with optional permutation null")
    dep.add_argument("--stat", default="all", choices=("all",) + STATISTICS)
    dep.add_argument("--input", nargs="+", required=True, metavar="CSV",
                     help="one two-column CSV, or two CSV files")
    dep.add_argument("--perm", type=int, default=0,
                     help="permutations for the null (0 disables)")
    dep.add_argument("--seed", type=int, help="permutation seed")
    dep.add_argument("--eps-linear", type=float, default=1e-6)
    dep.add_argument("--eps-rbf", type=float, default=1e-3)
    dep.add_argument("--out", help="JSON report path (default stdout)")
    dep.set_defaults(func=cmd_depend)

    sweep = sub.add_parser("sweep-sigma",
                           help="kGV/kCCA across RBF widths with linear baselines")
    sweep.add_argument("--input", nargs=2, metavar="CSV")
    sweep.add_argument("--preset", choices=("fig1",),
                       help="sweep all three benchmark regimes")
    sweep.add_argument("--seed", type=int, help="preset data seed")
    sweep.add_argument("--n", type=int, default=400, help="preset sample size")
    sweep.add_argument("--points", type=int, default=20)
    sweep.add_argument("--eps", type=float, default=1e-3)
    sweep.add_argument("--out", help="CSV path (default stdout)")
    sweep.set_defaults(func=cmd_sweep_sigma)

    equiv = sub.add_parser("equiv-check",
                           help="agreement of primal CCA, dual CCA and linear kCCA")
    equiv.add_argument("--input", nargs=2, metavar="CSV")
    equiv.add_argument("--seed", type=int, help="generator seed (without --input)")
    equiv.add_argument("--n", type=int, default=30)
    equiv.add_argument("--da", type=int, default=6)
    equiv.add_argument("--db", type=int, default=4)
    equiv.add_argument("--eps", type=float, default=1e-6)
    equiv.add_argument("--eps-dual", type=float, default=None,
                       help="override eps for the dual/kernel routes")
    equiv.add_argument("--tol", type=float, default=1e-6)
    equiv.set_defaults(func=cmd_equiv_check)

    table = sub.add_parser("table1",
                           help="battery verdicts across the three regimes")
    table.add_argument("--seed", type=int, required=True, help="data seed")
    table.add_argument("--n", type=int, default=400)
    table.add_argument("--perm", type=int, default=500)
    table.add_argument("--perm-seed", type=int, default=0)
    table.set_defaults(func=cmd_table1)

    return parser


def _emit_error(kind, exc, flag=None):
    payload = {"error": kind, "message": str(exc)}
    if flag:
        payload["flag"] = flag
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return int(args.func(args))
    except ConfigError as exc:
        _emit_error("config", exc, flag=exc.flag)
        return 2
    except (KmvaError, OSError, ValueError) as exc:
        _emit_error("data", exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
