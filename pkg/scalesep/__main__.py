import argparse
import math
import pathlib
import sys
import textwrap
import traceback

import termcolor

from . import _api, _data, _io, criterion, gaussian, tomogram, uncertainty, __version__


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNPHYSICAL = 2
EXIT_ENTANGLED = 3


def excepthook(cls, exc, tb):
    if issubclass(cls, _api.Error) and exc.args:
        termcolor.cprint(str(exc), "red", file=sys.stderr)
    elif cls is FileNotFoundError:
        termcolor.cprint("{} not found".format(exc.filename), "red", file=sys.stderr)
    elif not issubclass(cls, Exception) and not isinstance(exc, KeyboardInterrupt):
        # Class is some other BaseException, better just let it go
        return
    elif isinstance(exc, KeyboardInterrupt):
        print(file=sys.stderr)
    else:
        termcolor.cprint("Sorry, something's wrong! Rerun with --verbose to see what.", "red", file=sys.stderr)

    if excepthook.verbose:
        traceback.print_exception(cls, exc, tb)

    sys.exit(EXIT_USAGE)


# Assume we should print tracebacks until we get command line arguments
excepthook.verbose = True
sys.excepthook = excepthook


class ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write('error: %s\n' % message)
        sys.exit(EXIT_USAGE)


DESCRIPTION = textwrap.dedent("""\
    Test continuous-variable states for entanglement by partial scaling of their
    dispersion matrix.

    State files are JSON: {"n_modes": N, "mean": [2N reals], "cov": [[2N x 2N reals]]},
    with the canonical variables ordered q1, p1, q2, p2, ...

    Exit codes: 0 physical / not detected, 1 usage or I/O error, 2 unphysical,
    3 entangled. A determinant of exactly zero counts as not detected.
    """)


def emit(data, output=None):
    """Write ``data`` as deterministic JSON to ``output``, or to stdout."""
    text = _io.dumps(data) + "\n"
    if output is None:
        sys.stdout.write(text)
    else:
        pathlib.Path(output).write_text(text)


def sweep_config(args):
    return _data.SweepConfig(x_max=args.grid_xmax, points_per_sign=args.grid_points, spacing=args.grid_spacing)


def cmd_check(args):
    V = _io.read_state(args.state)
    tol = _data.Tolerance(rel=args.tol)
    report = uncertainty.rs_check(V, tol)
    data = {"physical": report.physical, "min_eig": report.min_eig, "det_c": report.det_c,
            "block_minors": list(report.block_minors)}
    if report.physical:
        bound = uncertainty.det_v_bound(V, tol)
        data.update(det_v=bound.det_v, bound=bound.bound, holds=bound.holds)
    emit(data, args.output)

    if not report.physical:
        termcolor.cprint("State violates the uncertainty relation.", "yellow", file=sys.stderr)
        return EXIT_UNPHYSICAL
    return EXIT_OK


def cmd_test(args):
    V = _io.read_state(args.state)
    grid = sweep_config(args)
    tol = criterion.verdict_tolerance(V, args.tol)

    if args.mode is None and not args.two_mode and V.n_modes != 2:
        raise _api.Error(f"state has {V.n_modes} modes, pass --mode K to test mode K against the rest")

    total = math.ceil(len(grid.points()) / criterion.CHUNK_SIZE)
    with _api.progress_bar("Sweeping", total=total, disable=args.debug):
        if args.mode is None:
            verdict = criterion.sweep_two_mode(V, grid, tol)
        else:
            verdict = criterion.sweep_mode_vs_rest(V, args.mode, grid, tol)

    emit(_io.verdict_report(verdict, __version__, tol, grid, args.mode), args.output)

    if verdict.status is _data.Status.UNPHYSICAL:
        termcolor.cprint("State violates the uncertainty relation.", "yellow", file=sys.stderr)
        return EXIT_UNPHYSICAL
    if verdict.entangled:
        termcolor.cprint(f"Entangled, witnessed by the scaling {verdict.witness.x.tolist()}.", "green", file=sys.stderr)
        return EXIT_ENTANGLED
    termcolor.cprint("No entanglement detected.", "green", file=sys.stderr)
    return EXIT_OK


def cmd_gaussian(args):
    M = _data.PureGaussianParams(args.m11, args.m22, args.m)
    if args.kind == "pure":
        V = gaussian.pure_covariance(M)
    else:
        mix = _data.GaussianMixtureParams(args.alpha, M, _data.PureGaussianParams(args.n11, args.n22, args.n))
        V = gaussian.mixture_covariance(mix)

    _io.write_state(V, args.output)
    emit({"det_c": uncertainty.rs_check(V).det_c})
    termcolor.cprint(f"Wrote {args.output}.", "green", file=sys.stderr)
    return EXIT_OK


def cmd_sweep_alpha(args):
    rows = gaussian.alpha_sweep(args.m11, args.m22, args.m, args.step, rel=args.tol)
    if args.output is None:
        _io.write_alpha_csv(rows, sys.stdout)
    else:
        with open(args.output, "w", newline="") as f:
            _io.write_alpha_csv(rows, f)
        termcolor.cprint(f"Wrote {len(rows)} rows to {args.output}.", "green", file=sys.stderr)
    return EXIT_OK


def cmd_tomogram(args):
    V = _io.read_state(args.state)
    t = tomogram.GaussianTomogram.of(V)
    grid = _data.NumericGrid(points=args.points, span_sigmas=args.span_sigmas, cross_points=args.cross_points)

    if args.samples is not None:
        directory = pathlib.Path(args.samples)
        directory.mkdir(parents=True, exist_ok=True)
        for setting in tomogram.recipe_settings(V.n_modes):
            st = tomogram.sample(t.marginal(setting.modes), setting.mu, setting.nu, grid.span_sigmas,
                                 grid.points if len(setting.modes) == 1 else grid.cross_points)
            _io.write_sampled(st, directory / f"{setting.label}.csv")

    extracted = tomogram.extract_dispersion(t, grid if args.numeric else None)
    emit({"n_modes": extracted.n_modes,
          "method": "numeric" if args.numeric else "analytic",
          "cov": extracted.matrix.tolist()}, args.output)
    return EXIT_OK


def cmd_random(args):
    V = uncertainty.random_physical_state(args.modes, args.seed, args.max_squeezing)
    _io.write_state(V, args.output)
    termcolor.cprint(f"Wrote {args.output}.", "green", file=sys.stderr)
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose",
                        action="store_true",
                        help="display the full tracebacks of any errors")
    common.add_argument("--debug",
                        action="store_true",
                        help="don't run anything in parallel, disable progress bar")

    tolerance = argparse.ArgumentParser(add_help=False)
    tolerance.add_argument("--tol",
                           action="store",
                           default=criterion.VERDICT_REL,
                           type=float,
                           help="relative tolerance of the verdict, against max|C| for check and max|V|^2 otherwise (default %(default)g)")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--grid-xmax",
                      action="store",
                      default=10.0,
                      type=float,
                      help="largest |x| of the scaling grid (default %(default)g)")
    grid.add_argument("--grid-points",
                      action="store",
                      default=101,
                      type=int,
                      help="grid points per sign of x (default %(default)d)")
    grid.add_argument("--grid-spacing",
                      choices=("log", "linear"),
                      default="log",
                      help="spacing of the scaling grid (default %(default)s)")

    fig = argparse.ArgumentParser(add_help=False)
    fig.add_argument("--m11", type=float, default=0.5, help="(default %(default)g)")
    fig.add_argument("--m22", type=float, default=0.5, help="(default %(default)g)")
    fig.add_argument("--m", type=float, default=0.4, help="(default %(default)g)")

    parser = ArgParser(prog="scalesep", description=DESCRIPTION, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-V", "--version",
                        action="version",
                        version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=ArgParser)
    subparsers.required = True

    check = subparsers.add_parser("check", parents=[common, tolerance],
                                  help="check the uncertainty relation and det V >= 4^-N")
    check.add_argument("state", help="path to a state file")
    check.add_argument("-o", "--output", help="write the JSON report here instead of stdout")
    check.set_defaults(func=cmd_check)

    test = subparsers.add_parser("test", parents=[common, tolerance, grid], help="test a state for entanglement")
    test.add_argument("state", help="path to a state file")
    which = test.add_mutually_exclusive_group()
    which.add_argument("--two-mode", action="store_true", help="two-mode test, scaling p2 (default for two modes)")
    which.add_argument("--mode", type=int, metavar="K", help="test mode K against the remaining modes")
    test.add_argument("-o", "--output", help="write the JSON report here instead of stdout")
    test.set_defaults(func=cmd_test)

    gauss = subparsers.add_parser("gaussian", parents=[common], help="write a two-mode Gaussian state file")
    kinds = gauss.add_subparsers(dest="kind", metavar="KIND", parser_class=ArgParser)
    kinds.required = True
    pure = kinds.add_parser("pure", parents=[fig], help="pure state of M = [[m11, m], [m, m22]]")
    pure.add_argument("-o", "--output", required=True, help="state file to write")
    mix = kinds.add_parser("mix", parents=[fig], help="alpha rho(M) + (1 - alpha) rho(N)")
    mix.add_argument("--alpha", type=float, default=0.5, help="(default %(default)g)")
    mix.add_argument("--n11", type=float, default=0.5, help="(default %(default)g)")
    mix.add_argument("--n22", type=float, default=0.5, help="(default %(default)g)")
    mix.add_argument("--n", type=float, default=-0.4, help="(default %(default)g)")
    mix.add_argument("-o", "--output", required=True, help="state file to write")
    gauss.set_defaults(func=cmd_gaussian)

    sweep = subparsers.add_parser("sweep-alpha", parents=[common, tolerance, fig],
                                  help="det C^x at x = -1 across mixtures with N = (m11, m22, -m), as CSV")
    sweep.add_argument("--step", type=float, default=0.01, help="spacing of alpha (default %(default)g)")
    sweep.add_argument("-o", "--output", help="CSV file to write instead of stdout")
    sweep.set_defaults(func=cmd_sweep_alpha)

    tomo = subparsers.add_parser("tomogram", parents=[common],
                                 help="reconstruct the dispersion matrix from the state's tomogram")
    tomo.add_argument("state", help="path to a state file")
    tomo.add_argument("--numeric", action="store_true", help="integrate sampled tomograms instead of using closed forms")
    tomo.add_argument("--points", type=int, default=2001, help="points per axis of 1-D samples (default %(default)d)")
    tomo.add_argument("--cross-points", type=int, default=301, help="points per axis of 2-D samples (default %(default)d)")
    tomo.add_argument("--span-sigmas", type=float, default=10.0, help="half-width of samples in standard deviations (default %(default)g)")
    tomo.add_argument("--samples", metavar="DIR", help="also write every sampled tomogram (CSV + JSON sidecar) to DIR")
    tomo.add_argument("-o", "--output", help="write the JSON result here instead of stdout")
    tomo.set_defaults(func=cmd_tomogram)

    rand = subparsers.add_parser("random", parents=[common], help="write a random physical state file")
    rand.add_argument("--modes", type=int, default=2, help="(default %(default)d)")
    rand.add_argument("--seed", type=int, default=0, help="(default %(default)d)")
    rand.add_argument("--max-squeezing", type=float, default=1.0, help="(default %(default)g)")
    rand.add_argument("-o", "--output", required=True, help="state file to write")
    rand.set_defaults(func=cmd_random)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)

    excepthook.verbose = args.verbose

    if args.debug:
        _api.Executor = _api.FauxExecutor

    try:
        code = args.func(args)
    except Exception:
        excepthook(*sys.exc_info())
    sys.exit(code)


if __name__ == "__main__":
    main()
