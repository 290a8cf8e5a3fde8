"""Command line interface: one executable, six subcommands.

    xeblab gen       write a random circuit file
    xeblab simulate  export the exact output distribution (binary)
    xeblab sample    draw a sample set from a device model or spoofer
    xeblab xeb       score samples against a circuit and verify XHOG
    xeblab reduce    run the MSE-gain benchmark for a named estimator
    xeblab analyze   distribution fits, moments, KL/Pinsker, distinguishability

Every subcommand is deterministic given identical flags (including --seed),
and all file outputs re-parse with the corresponding readers.  Exit codes:
0 success/pass, 1 statistical test failed, 2 usage error, 3 I/O error,
4 resource limit.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import analysis, circuit, estimators, samplers, simulator, xeb
from .errors import ConfigError, DomainError, ParseError, ResourceLimitError

EXIT_OK = 0
EXIT_TEST_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_RESOURCE = 4


def _default_threads() -> int:
    env = os.environ.get("XEBLAB_THREADS", "").strip()
    if env.isdigit() and int(env) > 0:
        return int(env)
    return 1


def _topology(args) -> "circuit.Chain1D | circuit.Grid2D":
    if args.topology == "chain":
        return circuit.Chain1D()
    if args.rows is None or args.cols is None:
        raise ConfigError("grid topology needs --rows and --cols")
    return circuit.Grid2D(args.rows, args.cols)


def _distribution(args) -> circuit.CircuitDistribution:
    return circuit.CircuitDistribution(
        n=args.n,
        depth=args.depth,
        topology=_topology(args),
        final_not_mask_layer=not args.no_final_mask,
    )


def _add_dist_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="qubit count")
    p.add_argument("--depth", type=int, default=20, help="cycles of 1q + CZ layers")
    p.add_argument("--topology", choices=("chain", "grid"), default="chain")
    p.add_argument("--rows", type=int, default=None)
    p.add_argument("--cols", type=int, default=None)
    p.add_argument(
        "--no-final-mask",
        action="store_true",
        help="drop the random NOT-mask layer from the ensemble",
    )


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _read_circuit(path: str) -> circuit.Circuit:
    with open(path) as fh:
        return circuit.parse_circuit(fh.read())


def _read_samples(path: str) -> samplers.SampleSet:
    with open(path) as fh:
        return samplers.parse_samples(fh.read())


def cmd_gen(args) -> int:
    c = circuit.sample_circuit(_distribution(args), args.seed)
    _write_text(args.out, circuit.serialize_circuit(c))
    return EXIT_OK


def cmd_simulate(args) -> int:
    c = _read_circuit(args.circuit)
    dist = simulator.full_distribution(c, max_qubits=args.max_qubits)
    simulator.write_distribution(dist, args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.sampler == "uniform":
        if args.n is None and args.circuit is None:
            raise ConfigError("uniform sampling needs --n or --circuit")
        n = args.n if args.n is not None else _read_circuit(args.circuit).n
        s = samplers.sample_uniform(n, args.k, args.seed, distinct=args.distinct)
    else:
        if args.circuit is None:
            raise ConfigError(f"sampler {args.sampler!r} needs --circuit")
        c = _read_circuit(args.circuit)
        if args.sampler == "ideal":
            s = samplers.sample_ideal(c, args.k, args.seed, distinct=args.distinct)
        elif args.sampler == "depolarizing":
            s = samplers.sample_depolarizing(
                c, args.phi, args.k, args.seed, distinct=args.distinct
            )
        else:  # topk
            s = samplers.sample_top_k(c, args.k)
    _write_text(args.out, samplers.serialize_samples(s))
    return EXIT_OK


def cmd_xeb(args) -> int:
    c = _read_circuit(args.circuit)
    s = _read_samples(args.samples)
    report = xeb.check_xhog(c, s, args.b, seed=args.seed)
    text = report.to_csv() if args.format == "csv" else report.to_text()
    _write_text(args.out, text)
    return EXIT_OK if report.xhog_pass else EXIT_TEST_FAIL


def _build_estimator(args):
    if args.estimator == "trivial":
        return estimators.trivial_estimator
    if args.estimator == "paths":
        return estimators.FeynmanEstimator(args.paths, args.path_variant)
    k = xeb.required_k(args.b, args.s)
    if args.estimator == "reduction-topk":
        return estimators.ReductionEstimator(estimators.TopKSolver(k), args.b)
    if args.estimator == "reduction-uniform":
        return estimators.ReductionEstimator(estimators.UniformSolver(k), args.b)
    raise ConfigError(f"unknown estimator {args.estimator!r}")


def cmd_reduce(args) -> int:
    est = _build_estimator(args)
    bench = estimators.run_mse_benchmark(
        _distribution(args), est, args.trials, args.seed, workers=args.threads
    )
    if args.out:
        _write_text(args.out, bench.to_csv())
    sys.stdout.write(bench.to_text())
    return EXIT_OK


def _render(args, rep) -> str:
    return rep.to_csv() if args.format == "csv" else rep.to_text()


def cmd_analyze(args) -> int:
    if args.mode == "kl":
        rep = analysis.kl_uniform_vs_xhog(args.b, k=args.k)
        _write_text(args.out, _render(args, rep))
        return EXIT_OK
    if args.mode == "pt":
        dist = _distribution(args)
        if args.dump_probs:
            pooled = analysis.pooled_rescaled_probabilities(dist, args.circuits, args.seed)
            stat = analysis.ks_distance_exp1(pooled)
            rep = analysis.FitReport(
                stat, pooled.size, stat < args.threshold, args.threshold
            )
            with open(args.dump_probs, "w") as fh:
                fh.writelines(f"{float(v)!r}\n" for v in pooled)
        else:
            rep = analysis.porter_thomas_fit(
                dist, args.circuits, args.seed, threshold=args.threshold
            )
        _write_text(args.out, _render(args, rep))
        return EXIT_OK if rep.passed else EXIT_TEST_FAIL
    if args.mode == "moments":
        dist = _distribution(args)
        rep = analysis.xeb_moment_check(
            dist, args.phi, args.circuits, args.samples_per_circuit, args.seed
        )
        _write_text(args.out, _render(args, rep))
        return EXIT_OK
    # distinguish
    adv = analysis.empirical_distinguishability(
        args.b, args.k, args.trials, args.n, args.seed, depth=args.depth
    )
    if args.format == "csv":
        _write_text(args.out, f"advantage\n{adv!r}\n")
    else:
        _write_text(args.out, f"advantage={adv!r}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xeblab",
        description="linear XEB scoring, spoofing, and estimator-reduction experiments",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=_default_threads(),
        help="worker processes for benchmarks (env XEBLAB_THREADS)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a random circuit file")
    _add_dist_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("simulate", help="export the exact output distribution")
    p.add_argument("--circuit", required=True)
    p.add_argument("--max-qubits", type=int, default=simulator.DEFAULT_MAX_QUBITS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sample", help="draw a sample set")
    p.add_argument(
        "--sampler", choices=("ideal", "uniform", "depolarizing", "topk"), required=True
    )
    p.add_argument("--circuit", default=None)
    p.add_argument("--n", type=int, default=None, help="qubits (uniform sampler)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--phi", type=float, default=1.0, help="depolarizing fidelity")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--distinct", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("xeb", help="score samples and verify XHOG")
    p.add_argument("--circuit", required=True)
    p.add_argument("--samples", required=True)
    p.add_argument("--b", type=float, required=True, help="threshold b (score >= b/2^n)")
    p.add_argument("--seed", type=int, default=None, help="provenance tag for the report")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_xeb)

    p = sub.add_parser("reduce", help="MSE-gain benchmark")
    _add_dist_flags(p)
    p.add_argument(
        "--estimator",
        choices=("trivial", "paths", "reduction-topk", "reduction-uniform"),
        required=True,
    )
    p.add_argument("--b", type=float, default=1.5)
    p.add_argument("--s", type=float, default=1.0, help="assumed solver success rate")
    p.add_argument("--paths", type=int, default=16)
    p.add_argument(
        "--path-variant", choices=estimators.PATH_VARIANTS, default="shrunk"
    )
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="per-trial CSV path")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("analyze", help="statistical checks")
    mode = p.add_subparsers(dest="mode", required=True)

    q = mode.add_parser("kl", help="KL divergence and Pinsker bound")
    q.add_argument("--b", type=float, required=True)
    q.add_argument("--k", type=int, default=None)
    q.add_argument("--format", choices=("text", "csv"), default="text")
    q.add_argument("--out", default="-")
    q.set_defaults(func=cmd_analyze)

    q = mode.add_parser("pt", help="exponential-law goodness of fit")
    _add_dist_flags(q)
    q.add_argument("--circuits", type=int, default=200)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--threshold", type=float, default=analysis.DEFAULT_KS_THRESHOLD)
    q.add_argument("--dump-probs", default=None, help="write pooled rescaled probabilities")
    q.add_argument("--format", choices=("text", "csv"), default="text")
    q.add_argument("--out", default="-")
    q.set_defaults(func=cmd_analyze)

    q = mode.add_parser("moments", help="depolarizing mean/variance check")
    _add_dist_flags(q)
    q.add_argument("--phi", type=float, required=True)
    q.add_argument("--circuits", type=int, default=40)
    q.add_argument("--samples-per-circuit", type=int, default=3000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--format", choices=("text", "csv"), default="text")
    q.add_argument("--out", default="-")
    q.set_defaults(func=cmd_analyze)

    q = mode.add_parser("distinguish", help="likelihood-ratio advantage")
    q.add_argument("--b", type=float, required=True)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--trials", type=int, default=2000)
    q.add_argument("--n", type=int, default=10)
    q.add_argument("--depth", type=int, default=20)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--format", choices=("text", "csv"), default="text")
    q.add_argument("--out", default="-")
    q.set_defaults(func=cmd_analyze)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
