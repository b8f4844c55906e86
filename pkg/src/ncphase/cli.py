"""Command-line front end.

Every run prints a deterministic report: a header echoing the resolved
configuration, then ``key = value`` lines (``--format human`` aligns them
with ``:`` instead).  Exit status is 0 on success, 1 on a domain error
(singular theta, insufficient truncation, ...) and 2 on bad input.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import selftest
from .algebra import Bivector, DimensionError, PhasePoly, moyal_bracket, poisson_bracket, star
from .bogoliubov import (
    BogoliubovTransform,
    algebra_residual,
    q_algebra_residual,
    q_condition_table,
    theta_mode_commutators,
)
from .fock import FockBasis, OperatorMatrix, adapted_representation, composition_residual, weyl_quantize
from .gauge import (
    CovariantCoords,
    MatrixPoly,
    block_unitary,
    field_strength,
    gauge_transform,
    sw_field_strength,
    vacuum_coords,
    ym_action,
)
from .gaussian import QuadraticAction, green, log_partition
from .grammar import (
    InputFormatError,
    format_complex,
    parse_bivector,
    parse_matrix,
    parse_symbol,
    render,
)
from .landau import braiding_phase, landau_system, shifted_commutator
from .oscillators import q_mode, susy_system, witten_report

SUBCOMMANDS = (
    "star", "bracket", "quantize", "qosc", "witten", "bogoliubov", "theta-modes",
    "ym", "swfield", "landau", "braid", "gaussian",
)


class InputError(Exception):
    pass


def seed() -> int:
    return int(os.environ.get("NC_SEED", "0"))


def _fmt(v) -> str:
    if isinstance(v, PhasePoly):
        return render(v)
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (complex, np.complexfloating)):
        return format_complex(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt(x) for x in v)
    return str(v)


class Report:
    def __init__(self, command: str, config: dict):
        self.command = command
        self.config = config
        self.rows: list[tuple[str, str]] = []

    def add(self, key: str, value) -> None:
        self.rows.append((key, _fmt(value)))

    def render(self, mode: str = "structured") -> str:
        head = [("command", self.command)] + [
            (f"config.{k}", _fmt(v)) for k, v in sorted(self.config.items()) if v is not None
        ]
        rows = head + self.rows
        if mode == "human":
            width = max(len(k) for k, _ in rows)
            return "\n".join(f"{k.ljust(width)} : {v}" for k, v in rows) + "\n"
        return "\n".join(f"{k} = {v}" for k, v in rows) + "\n"


# --- input helpers ------------------------------------------------------------


def _text_or_file(value: str) -> str:
    p = Path(value)
    if len(value) < 4096 and p.is_file():
        return p.read_text(encoding="utf-8")
    return value.replace(";", "\n")


def _bivector(args, phase: bool = False) -> Bivector:
    if getattr(args, "bivector", None):
        text = _text_or_file(args.bivector)
        try:
            n = int(text.split()[0])
        except (IndexError, ValueError):
            raise InputError(f"bad bivector {args.bivector!r}") from None
        names = None
        if phase or getattr(args, "phase", False):
            if n % 2:
                raise InputError("phase-space bivector needs an even generator count")
            from .algebra import phase_space_names

            names = phase_space_names(n // 2)
        return parse_bivector(text, names)
    if getattr(args, "theta", None) is not None:
        return Bivector.plane(args.theta)
    raise InputError("need --theta or --bivector")


def _symbol(text: str, names) -> PhasePoly:
    return parse_symbol(_text_or_file(text).strip(), names)


# --- subcommands ----------------------------------------------------------------


def cmd_star(args, rep: Report):
    pi = _bivector(args)
    f, g = _symbol(args.f, pi.names), _symbol(args.g, pi.names)
    fg = star(f, g, pi)
    com = moyal_bracket(f, g, pi)
    rep.add("star", fg)
    rep.add("commutator", com)
    if com.degree <= 0:
        rep.add("commutator.constant", com.constant_term())


def cmd_bracket(args, rep: Report):
    pi = _bivector(args)
    f, g = _symbol(args.f, pi.names), _symbol(args.g, pi.names)
    rep.add("moyal_bracket", moyal_bracket(f, g, pi))
    rep.add("poisson_bracket", poisson_bracket(f, g, pi))
    rep.add("i*poisson_bracket", poisson_bracket(f, g, pi) * 1j)


def cmd_quantize(args, rep: Report):
    from .algebra import phase_space_names

    names = phase_space_names(args.modes)
    f = _symbol(args.f, names)
    basis = FockBasis.bose(args.cutoff, args.modes)
    W = weyl_quantize(f, basis)
    rep.add("dim", basis.dim)
    rep.add("hermitian", W.is_hermitian())
    rep.add("norm_max", W.norm())
    if args.g:
        g = _symbol(args.g, names)
        pi = Bivector.canonical(args.modes)
        fg = star(f, g, pi)
        for c in args.cutoffs:
            rep.add(f"composition_residual[{c}]", composition_residual(f, g, fg, FockBasis.bose(c, args.modes)))
    if args.out:
        Path(args.out).write_text(W.dumps(), encoding="utf-8")
        rep.add("written", args.out)


def cmd_qosc(args, rep: Report):
    osc = q_mode(args.q, args.cutoff)
    rep.add("dimension", osc.cutoff)
    rep.add("levels", [float(v) for v in osc.levels])
    rep.add("recursion_residual", osc.recursion_residual())
    r = osc.q_residual()
    rep.add("q_residual_interior", float(np.max(np.abs(np.diag(r)[:-1]))) if osc.cutoff > 1 else 0.0)


def cmd_witten(args, rep: Report):
    s = susy_system(args.cutoff, args.form)
    for beta in args.beta:
        r = witten_report(s, beta, args.margin)
        rep.add(f"index[beta={beta!r}]", r.index)
    rep.add("graded_kernel", r.graded_kernel)
    rep.add("dim_ker(Q-Q+)", r.kernel_q_minus_qdag)
    if args.form == "qdag_q":
        rep.add("commutant_residual", s.commutant_residual(args.margin))
    if args.pairing:
        for k, (w, bose) in enumerate(r.pairing):
            rep.add(f"pairing[{k}]", f"{w:.12g} {'bose' if bose else 'fermi'}")


def cmd_bogoliubov(args, rep: Report):
    if args.draws:
        rng = np.random.default_rng(seed())
        rows = q_condition_table(args.draws, args.q if args.q is not None else -1.0, rng)
        for row in rows:
            rep.add(
                f"draw[{row['draw']}]",
                f"oracle_max={row['oracle_max']:.6e} condition_max={row['condition_max']:.6e} "
                f"oracle_preserves={str(row['oracle_preserves']).lower()} "
                f"conditions_hold={str(row['conditions_hold']).lower()}",
            )
        rep.add("agreement", sum(r["agree"] for r in rows))
        return
    if args.squeeze is not None:
        T = BogoliubovTransform.squeeze(args.squeeze)
    elif args.transform:
        T = BogoliubovTransform.parse(_text_or_file(args.transform))
    else:
        raise InputError("need --transform, --squeeze or --draws")
    rep.add("adjoint_consistent", T.is_adjoint_consistent())
    for line in algebra_residual(T, args.stat).lines():
        k, _, v = line.partition(" = ")
        rep.add(k, v)
    if args.q is not None:
        for line in q_algebra_residual(T, args.q).lines():
            k, _, v = line.partition(" = ")
            rep.add(f"q.{k}", v)


def cmd_theta_modes(args, rep: Report):
    if args.B is not None:
        eps = np.array([[0.0, 1.0], [-1.0, 0.0]])
        tx, tp = eps / args.B, eps * args.B
    else:
        if not (args.theta_x and args.theta_p):
            raise InputError("need --B or both --theta-x and --theta-p")
        tx = parse_bivector(_text_or_file(args.theta_x)).matrix
        tp = parse_bivector(_text_or_file(args.theta_p)).matrix
    t = theta_mode_commutators(tx, tp)
    n = tx.shape[0]
    for label, M in (("[a^i,a^j]", t.aa), ("[a^i,a^+j]", t.aadag), ("[a^+i,a^+j]", t.adagadag)):
        for i in range(n):
            for j in range(n):
                rep.add(f"{label}[{i + 1},{j + 1}]", complex(M[i, j]))
    for k, v in t.closed_form().items():
        rep.add(f"closed_form{k}", v)
    for k, v in t.discrepancies().items():
        rep.add(f"condition_discrepancy.{k}", v)


def cmd_ym(args, rep: Report):
    theta = _bivector(args)
    C = vacuum_coords(theta, args.cutoff, args.coupling)
    if args.A and not args.vacuum:
        _, xs = adapted_representation(theta, args.cutoff)
        shifts = [weyl_quantize(_symbol(a, theta.names), generators=xs) for a in args.A]
        if len(shifts) != theta.n:
            raise InputError(f"need {theta.n} --A symbols, got {len(shifts)}")
        C = C.shifted(shifts)
    F = field_strength(C)
    from .fock import interior_block

    rep.add("action", ym_action(C, args.margin))
    for i in range(theta.n):
        for j in range(i + 1, theta.n):
            rep.add(f"F_norm[{i + 1},{j + 1}]", interior_block(F[i][j], args.margin).norm())
    rng = np.random.default_rng(seed())
    base = ym_action(C, args.margin)
    worst = 0.0
    for _ in range(args.gauge_trials):
        U = block_unitary(C.basis, args.margin, rng)
        worst = max(worst, abs(ym_action(gauge_transform(C, U), args.margin) - base))
    rep.add("gauge_invariance_residual", worst)


def cmd_swfield(args, rep: Report):
    theta = _bivector(args)
    if not args.A or len(args.A) != theta.n:
        raise InputError(f"need {theta.n} --A symbols")
    A = [MatrixPoly.scalar(_symbol(a, theta.names)) for a in args.A]
    F = sw_field_strength(A, theta, args.convention)
    for i in range(theta.n):
        for j in range(i + 1, theta.n):
            rep.add(f"F[{i + 1},{j + 1}]", F[i][j][0, 0])


def cmd_landau(args, rep: Report):
    if args.action == "braid":
        return cmd_braid(args, rep)
    L = landau_system(args.B, args.cutoff)
    spec = L.interior_spectrum(args.margin)
    rep.add("theta", L.theta)
    rep.add("spectrum", [float(v) for v in spec])
    rep.add("level_spacing_residual", float(np.max(np.abs(np.diff(spec) - args.B))))
    rep.add("commutator_residual", L.commutator_residual(args.margin))
    rep.add("shifted_commutator", shifted_commutator(L.theta, args.B))


def cmd_braid(args, rep: Report):
    if args.theta is None:
        raise InputError("need --theta")
    r = braiding_phase(args.theta, args.cutoff)
    rep.add("phase", r.phase)
    rep.add("expected_exp(-i*theta)", r.expected)
    rep.add("error", abs(r.phase - r.expected))
    rep.add("interior_deviation", r.deviation)
    rep.add("alternative_exp(-2*pi*i*theta)", r.alternative)


def cmd_gaussian(args, rep: Report):
    if not args.h:
        raise InputError("need --h")
    Qa = QuadraticAction(parse_matrix(_text_or_file(args.h)), args.stat)
    J = None
    if args.J:
        J = parse_matrix(_text_or_file(args.J)).reshape(-1)
        if len(J) != Qa.m:
            raise InputError(f"source has {len(J)} components for m={Qa.m}")
    rep.add("log_Z", log_partition(Qa, J))
    rep.add("Z_ratio", complex(np.exp(log_partition(Qa, J))))
    if args.green:
        toks = [t for t in args.green.split(",") if t.strip()]
        if len(toks) % 2:
            raise InputError("--green takes mode,conjugated pairs")
        try:
            ins = [(bool(int(toks[k + 1])), int(toks[k])) for k in range(0, len(toks), 2)]
        except ValueError:
            raise InputError(f"--green entries must be integers: {args.green!r}") from None
        rep.add("green", green(Qa, ins))
        if len(ins) % 2:
            rep.add("note", "odd correlator")


HANDLERS = {
    "star": cmd_star,
    "bracket": cmd_bracket,
    "quantize": cmd_quantize,
    "qosc": cmd_qosc,
    "witten": cmd_witten,
    "bogoliubov": cmd_bogoliubov,
    "theta-modes": cmd_theta_modes,
    "ym": cmd_ym,
    "swfield": cmd_swfield,
    "landau": cmd_landau,
    "braid": cmd_braid,
    "gaussian": cmd_gaussian,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncphase", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--selftest", action="store_true", help="run built-in checks and exit")
        p.add_argument("--format", choices=("structured", "human"), default="structured")
        return p

    def bivector_opts(p):
        p.add_argument("--theta", type=float, help="plane bivector [x1, x2] = i theta")
        p.add_argument("--bivector", help="'n e12 e13 ...' upper triangle, or a file")
        p.add_argument("--phase", action="store_true", help="name generators x1..xk, p1..pk")

    p = add("star", "star product and commutator of two symbols")
    bivector_opts(p)
    p.add_argument("--f", default="0")
    p.add_argument("--g", default="0")

    p = add("bracket", "Moyal and Poisson brackets")
    bivector_opts(p)
    p.add_argument("--f", default="0")
    p.add_argument("--g", default="0")

    p = add("quantize", "Weyl-quantize a symbol over canonical modes")
    p.add_argument("--f", default="1")
    p.add_argument("--g", help="second symbol for the composition residual")
    p.add_argument("--modes", type=int, default=1)
    p.add_argument("--cutoff", type=int, default=8)
    p.add_argument("--cutoffs", type=int, nargs="+", default=[8, 12, 16, 24])
    p.add_argument("--out", help="write the operator matrix to this file")

    p = add("qosc", "q-deformed oscillator levels")
    p.add_argument("--q", type=float, default=-1.0)
    p.add_argument("--cutoff", type=int, default=8)

    p = add("witten", "SUSY oscillator and Witten index")
    p.add_argument("--cutoff", type=int, default=16)
    p.add_argument("--beta", type=float, nargs="+", default=[1.0])
    p.add_argument("--form", choices=("anticommutator", "qdag_q"), default="anticommutator")
    p.add_argument("--margin", type=int, default=1)
    p.add_argument("--pairing", action="store_true", help="emit the pairing table")

    p = add("bogoliubov", "algebra residuals of a Bogoliubov transform")
    p.add_argument("--transform", help="'m' then alpha, beta, gamma, delta blocks, or a file")
    p.add_argument("--squeeze", type=float, help="one-mode squeeze parameter r")
    p.add_argument("--stat", choices=("bose", "fermi"), default="bose")
    p.add_argument("--q", type=float, help="also evaluate the one-mode q-algebra conditions")
    p.add_argument("--draws", type=int, default=0, help="tabulate oracle vs block conditions over random draws")

    p = add("theta-modes", "commutators of a^i = (x^i + i p_i)/sqrt2 under theta forms")
    p.add_argument("--B", type=float, help="theta_x = eps/B, theta_p = B eps")
    p.add_argument("--theta-x", dest="theta_x")
    p.add_argument("--theta-p", dest="theta_p")

    p = add("ym", "noncommutative Yang-Mills matrix action")
    bivector_opts(p)
    p.add_argument("--cutoff", type=int, default=12)
    p.add_argument("--coupling", type=float, default=1.0)
    p.add_argument("--margin", type=int, default=2)
    p.add_argument("--vacuum", action="store_true")
    p.add_argument("--A", action="append", help="gauge field symbol per coordinate (repeat)")
    p.add_argument("--gauge-trials", dest="gauge_trials", type=int, default=3)

    p = add("swfield", "theta-corrected field strength of abelian symbols")
    bivector_opts(p)
    p.add_argument("--A", action="append")
    p.add_argument("--convention", choices=("imaginary", "real"), default="imaginary")

    p = add("landau", "Landau system spectrum, or braiding with 'landau braid'")
    p.add_argument("action", nargs="?", choices=("spectrum", "braid"), default="spectrum")
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--cutoff", type=int, default=16)
    p.add_argument("--margin", type=int, default=2)
    p.add_argument("--theta", type=float)

    p = add("braid", "exponential braiding phase")
    p.add_argument("--theta", type=float)
    p.add_argument("--cutoff", type=int, default=64)

    p = add("gaussian", "Gaussian partition function and Wick correlators")
    p.add_argument("--stat", choices=("bose", "fermi"), default="bose")
    p.add_argument("--h", help="hermitian matrix file (or inline rows separated by ';')")
    p.add_argument("--J", help="source vector")
    p.add_argument("--green", help="mode,conjugated pairs, e.g. 0,0,0,1 for <chi_0 chi^+_0>")
    return parser


_INPUT_ERRORS = (InputError, InputFormatError, DimensionError, FileNotFoundError, IndexError)


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    config = {k: v for k, v in vars(args).items() if k != "command"}
    rep = Report(args.command, config)
    if args.selftest:
        results = selftest.run(args.command)
        for name, ok in results.items():
            rep.add(f"selftest[{name}]", "pass" if ok else "FAIL")
        stdout.write(rep.render(args.format))
        return 0 if all(results.values()) else 1
    try:
        HANDLERS[args.command](args, rep)
    except _INPUT_ERRORS as exc:
        stderr.write(f"input error: {exc}\n")
        return 2
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        stderr.write(f"domain error: {exc}\n")
        return 1
    stdout.write(rep.render(args.format))
    return 0


def main() -> None:
    sys.exit(run())
