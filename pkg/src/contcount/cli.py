"""Command-line surface.

Subcommands:

* ``coeffs``  - dump the square-root factorization coefficients as CSV
* ``count``   - run a private counting mechanism over a bit stream
* ``compare`` - closed-form error table: factorization vs binary mechanism
* ``certify`` - factorization-norm bounds and dual certificate for a CSV matrix
* ``ftrl``    - multi-seed DP-FTRL regret experiment

Every command is deterministic given its flags (and seed).  CSV output
carries a header row; floats are printed with 17 significant digits.
Exit codes: 0 success, 2 usage error, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import certificates, workload
from .factorization import honaker_left, sqrt_coefficients
from .ftrl import logistic_task, run_dp_ftrl_logistic
from .linalg import read_matrix_csv
from .mechanism import (
    MECHANISM_KINDS,
    PrivacyBudget,
    StreamingCounter,
    binary_mechanism_run,
    matrix_mechanism_run,
)

# Learner noise must not reuse the data-generation stream of the same seed.
_NOISE_SEED_OFFSET = 2**32


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _emit(lines, out_path: str | None) -> None:
    payload = "\n".join(lines) + "\n"
    if out_path is None or out_path == "-":
        sys.stdout.write(payload)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(payload)


def _budget(eps: float, delta: float) -> PrivacyBudget:
    return PrivacyBudget(epsilon=eps, delta=delta, allow_large_epsilon=True)


def cmd_coeffs(args) -> int:
    factor = sqrt_coefficients(args.n)
    lines = ["index,value"]
    lines += [f"{k},{_fmt(v)}" for k, v in enumerate(factor.coeffs)]
    _emit(lines, args.out)
    return 0


def _read_bits(path: str | None) -> np.ndarray:
    stream = sys.stdin if path is None or path == "-" else open(path, "r", encoding="utf-8")
    try:
        bits = []
        for lineno, line in enumerate(stream, start=1):
            line = line.strip()
            if not line:
                continue
            if line not in ("0", "1"):
                raise ValueError(f"line {lineno}: expected a 0 or 1 bit, got {line!r}")
            bits.append(int(line))
    finally:
        if stream is not sys.stdin:
            stream.close()
    if not bits:
        raise ValueError("empty bit stream")
    return np.array(bits, dtype=np.int64)


def cmd_count(args) -> int:
    bits = _read_bits(args.input)
    n = args.n if args.n is not None else len(bits)
    if len(bits) < n:
        raise ValueError(f"stream provides {len(bits)} bits but --n={n}")
    bits = bits[:n]
    budget = _budget(args.eps, args.delta)

    if args.mechanism == "factorization":
        counter = StreamingCounter(n, budget, args.seed)
        noisy = np.array([counter.step(int(b)) for b in bits])
    elif args.mechanism == "binary":
        noisy = binary_mechanism_run(bits, budget, args.seed)
    else:
        noisy = matrix_mechanism_run(honaker_left(n), bits.astype(float), budget, args.seed)

    true = np.cumsum(bits)
    lines = ["t,true_count,noisy_count"]
    lines += [f"{t + 1},{true[t]},{_fmt(noisy[t])}" for t in range(n)]
    _emit(lines, args.out)
    return 0


def binary_expected_err(n: int, budget: PrivacyBudget) -> float:
    """Closed-form expected MSE of the binary mechanism at a power-of-two n:
    C^2 (1 + log2 n) (n log2(n)/2 + 1) / n, using the exact popcount norm."""
    if n & (n - 1):
        raise ValueError(f"n must be a power of two, got {n}")
    c = budget.noise_multiplier
    m = int(math.log2(n))
    return c * c * (1.0 + m) * (n * m / 2.0 + 1.0) / n


@dataclass(frozen=True)
class ComparisonRow:
    """One octave of the closed-form mechanism comparison."""

    n: int
    eps_fact: float
    eps_bin: float
    delta: float
    err_fact_upper: float
    err_lower_matrix_mech: float
    err_binary_expected: float

    @property
    def ratio_binary_over_fact(self) -> float:
        return self.err_binary_expected / self.err_fact_upper

    def __post_init__(self):
        if self.err_lower_matrix_mech > self.err_fact_upper:
            raise ValueError("lower bound exceeds the guaranteed upper bound")

    def as_csv(self) -> str:
        return ",".join(
            [
                str(self.n),
                _fmt(self.eps_fact),
                _fmt(self.eps_bin),
                _fmt(self.delta),
                _fmt(self.err_fact_upper),
                _fmt(self.err_lower_matrix_mech),
                _fmt(self.err_binary_expected),
                _fmt(self.ratio_binary_over_fact),
            ]
        )


def comparison_rows(n_max: int, eps_fact: float, eps_bin: float, delta: float):
    fact_budget = _budget(eps_fact, delta)
    bin_budget = _budget(eps_bin, delta)
    rows = []
    k = 1
    while 2**k <= n_max:
        n = 2**k
        rows.append(
            ComparisonRow(
                n=n,
                eps_fact=eps_fact,
                eps_bin=eps_bin,
                delta=delta,
                err_fact_upper=workload.err_upper_bound(n, fact_budget),
                err_lower_matrix_mech=workload.err_lower_bound_matrix_mech(n, fact_budget),
                err_binary_expected=binary_expected_err(n, bin_budget),
            )
        )
        k += 1
    return rows


def cmd_compare(args) -> int:
    lines = [
        "n,eps_fact,eps_bin,delta,err_fact_upper,err_lower_matrix_mech,"
        "err_binary_expected,ratio_binary_over_fact"
    ]
    lines += [row.as_csv() for row in comparison_rows(args.n_max, args.eps_fact, args.eps_bin, args.delta)]
    _emit(lines, args.out)
    return 0


def cmd_certify(args) -> int:
    matrix = read_matrix_csv(args.matrix)
    lower = certificates.gamma_lower(matrix)
    upper = certificates.gamma_upper(matrix)
    cert = certificates.build_svd_certificate(matrix)
    feasible, objective = certificates.verify_certificate(matrix, cert)
    lines = [
        "lower_bound,upper_bound,feasible,objective",
        f"{_fmt(lower)},{_fmt(upper)},{str(feasible).lower()},{_fmt(objective)}",
    ]
    _emit(lines, args.out)
    return 0


def cmd_ftrl(args) -> int:
    budget = _budget(args.eps, args.delta)
    lines = ["seed,regret,bound"]
    for i in range(args.seeds_count):
        seed = args.seed + i
        task = logistic_task(args.n, args.d, seed)
        report = run_dp_ftrl_logistic(
            task, budget, seed + _NOISE_SEED_OFFSET, kappa=args.kappa, radius=args.radius
        )
        lines.append(f"{seed},{_fmt(report.regret)},{_fmt(report.bound)}")
    _emit(lines, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contcount",
        description="Differentially private continual counting toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="emit the factorization coefficients f(0..n-1)")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("count", help="private counting over a bit stream")
    p.add_argument("--input", default=None, help="file of 0/1 lines (default: stdin)")
    p.add_argument("--n", type=_positive_int, default=None)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mechanism", choices=MECHANISM_KINDS, default="factorization")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("compare", help="closed-form error comparison at n = 2^k")
    p.add_argument("--n-max", type=_positive_int, required=True)
    p.add_argument("--eps-fact", type=float, default=1.0)
    p.add_argument("--eps-bin", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1e-10)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("certify", help="factorization-norm bounds for a CSV matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("ftrl", help="multi-seed DP-FTRL regret experiment")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds-count", type=_positive_int, default=1)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_ftrl)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"contcount: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
