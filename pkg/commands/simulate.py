"""simulate: run a benchmark preset or a custom design and write its report."""
import logging
from dataclasses import replace

from config import DEFAULT_FOLDS
from simulation import (
    AR1Normal,
    BernoulliHalfMixed,
    Preset,
    SimDesign,
    StdNormal,
    Uniform,
    generate,
    get_preset,
    run_benchmark,
)
from simulation.bench import COMPARATORS
from simulation.presets import COMPARISON_SCHEMES, COVERAGE_LAWS, PRESETS
from utils.errors import EXIT_OK, UsageError
from utils.io import write_dataset, write_frame, write_json
from .common import (
    COMMON_DEFAULTS,
    MODEL_DEFAULTS,
    PANDA_DEFAULTS,
    PANDA_KEYS,
    add_common_args,
    add_model_args,
    add_panda_args,
    as_floats,
    build_config,
    build_family,
    build_scheme,
    ensure_seed,
    explicit_keys,
    finish_manifest,
    output_dir,
    resolve_settings,
    start_manifest,
)

logger = logging.getLogger(__name__)

LAWS = ("std_normal", "ar1_normal", "uniform", "bernoulli_half_mixed")

SIM_DEFAULTS = {
    **COMMON_DEFAULTS,
    **MODEL_DEFAULTS,
    **PANDA_DEFAULTS,
    "preset": None,
    "preset_family": None,
    "preset_scheme": None,
    "n": None,
    "beta": None,
    "law": "std_normal",
    "rho": 0.5,
    "lo": -1.0,
    "hi": 1.0,
    "sigma": None,
    "intercept": 0.0,
    "n_test": None,
    "replicates": None,
    "comparator": "mle",
    "with_inference": True,
    "export_data": None,
    "generate_only": False,
    "folds": DEFAULT_FOLDS,
}


def build_law(settings: dict):
    name = str(settings["law"]).lower()
    if name == "std_normal":
        return StdNormal()
    if name == "ar1_normal":
        return AR1Normal(float(settings["rho"]))
    if name == "uniform":
        return Uniform(float(settings["lo"]), float(settings["hi"]))
    if name == "bernoulli_half_mixed":
        return BernoulliHalfMixed(float(settings["rho"]))
    raise UsageError(f"Unknown predictor law: {name}. Available: {list(LAWS)}")


def preset_run(settings: dict, args, seed: int) -> Preset:
    """Build a preset and apply explicitly given PANDA settings on top of it."""
    name = settings["preset"]
    kwargs = {"n": settings.get("n"), "replicates": settings.get("replicates"), "seed": seed}
    if name == "table3":
        kwargs["family"] = settings.get("preset_family")
    else:
        kwargs["scheme"] = settings.get("preset_scheme")
        kwargs["folds"] = settings.get("folds")
        if name == "table4":
            kwargs["sigma"] = settings.get("sigma")
    preset = get_preset(name, **kwargs)

    overrides = {k: settings[k] for k in explicit_keys(args, SIM_DEFAULTS) & set(PANDA_KEYS)}
    if overrides:
        logger.info(f"PRESET: overriding {sorted(overrides)}")
        preset = replace(preset, config=preset.config.replace(**overrides))
    return preset


def custom_run(settings: dict, seed: int) -> Preset:
    beta = as_floats(settings.get("beta"))
    if not beta:
        raise UsageError("a custom design needs --beta (or use --preset)")
    if not settings.get("n"):
        raise UsageError("a custom design needs --n")
    family = build_family(settings)
    design = SimDesign(
        family=family,
        n=int(settings["n"]),
        p=len(beta),
        beta_true=beta,
        predictor_law=build_law(settings),
        sigma=float(settings["sigma"] or 1.0),
        intercept=float(settings["intercept"]),
        replicates=int(settings["replicates"] or 1),
        seed=seed,
        n_test=settings.get("n_test"),
    )
    config = build_config(settings, seed)
    # column-based scheme options resolve against the first replicate's columns
    scheme = build_scheme(settings, generate(design, 0)[0], family, config)
    return Preset(name="custom", design=design, scheme=scheme, config=config)


def run_simulate(args) -> int:
    settings = resolve_settings(args, SIM_DEFAULTS)
    seed, drawn = ensure_seed(settings)
    manifest = start_manifest(args, "simulate", settings, seed, drawn)
    out = output_dir(settings)

    preset = preset_run(settings, args, seed) if settings.get("preset") else custom_run(settings, seed)
    if "comparator" in explicit_keys(args, SIM_DEFAULTS):
        preset = replace(preset, comparator=settings["comparator"])
    design = preset.design
    outputs = [write_json(preset.to_dict(), out / "design.json")]

    n_export = min(int(settings.get("export_data") or 0), design.replicates)
    for i in range(n_export):
        data, _ = generate(design, i)
        outputs.append(write_dataset(data, out / f"replicate_{i:04d}.csv"))
    if n_export:
        logger.info(f"EXPORT: {n_export} replicate datasets written to {out}")

    if not settings["generate_only"]:
        report = run_benchmark(
            design,
            preset.scheme,
            preset.config,
            comparator=preset.comparator,
            tune_grid=preset.tune_grid,
            with_inference=preset.with_inference and settings["with_inference"],
            n_jobs=int(settings["n_jobs"]),
        )
        outputs.append(write_frame(report.records, out / "bench_records.csv"))
        outputs.append(write_json({"preset": preset.name, **report.summary()}, out / "bench_summary.json"))
        if report.n_failed:
            manifest.warnings.append(f"{report.n_failed} of {design.replicates} replicates failed")
        print(f"{preset.name}: ok={report.n_ok} failed={report.n_failed} mrme={report.mrme:.2f} "
              f"zeros={report.correct_zeros:.2f}/{report.incorrect_zeros:.2f} "
              f"coverage zero/nonzero={report.coverage_zero:.1f}/{report.coverage_nonzero:.1f}")

    finish_manifest(manifest, out, outputs)
    return EXIT_OK


def register_simulate_command(subparsers) -> None:
    parser = subparsers.add_parser(
        "simulate",
        help="Run simulation benchmarks (presets table3, table4, table5 or a custom design)",
        description="Generate replicates, fit PANDA and a comparator, and write bench_records.csv "
                    "and bench_summary.json.",
    )
    add_common_args(parser)
    add_model_args(parser)
    add_panda_args(parser)
    parser.add_argument("--preset", choices=list(PRESETS), help="Benchmark preset")
    parser.add_argument("--preset-family", choices=list(COVERAGE_LAWS), help="Family for table3")
    parser.add_argument("--preset-scheme", choices=COMPARISON_SCHEMES, help="Regularizer for table4/table5")
    parser.add_argument("--n", type=int, help="Sample size per replicate")
    parser.add_argument("--beta", help="Comma-separated true slopes (custom design)")
    parser.add_argument("--law", choices=LAWS, help="Predictor law (custom design)")
    parser.add_argument("--rho", type=float, help="AR(1) correlation")
    parser.add_argument("--lo", type=float, help="Uniform lower bound")
    parser.add_argument("--hi", type=float, help="Uniform upper bound")
    parser.add_argument("--sigma", type=float, help="Gaussian noise standard deviation")
    parser.add_argument("--intercept", type=float, help="True intercept (custom design)")
    parser.add_argument("--n-test", type=int, help="Test-set size per replicate (default: n)")
    parser.add_argument("--replicates", type=int, help="Number of replicates")
    parser.add_argument("--comparator", choices=COMPARATORS, help="Un-penalized reference fit (default: mle)")
    parser.add_argument("--no-inference", dest="with_inference", action="store_const", const=False,
                        help="Skip confidence intervals")
    parser.add_argument("--export-data", type=int, metavar="K", help="Write the first K replicate datasets as CSV")
    parser.add_argument("--generate-only", action="store_const", const=True,
                        help="Only generate (and export) data; skip fitting")
    parser.add_argument("--folds", "-K", type=int, help=f"CV folds for tuned presets (default: {DEFAULT_FOLDS})")
    parser.set_defaults(handler=run_simulate)
