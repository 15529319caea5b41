"""Random rank-r test instances, a worst-case Toeplitz family, and matrix file I/O.

Files use the Matrix Market exchange format: ``coordinate real general`` is
accepted for sparse input, ``array real general`` is what we write (dense,
column-major, 17 significant digits so reads round-trip exactly).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .matrix_core import as_matrix

__all__ = [
    "InstanceSpec",
    "WorstCaseSpec",
    "MatrixMarketError",
    "gen_rank_r",
    "worst_case_build",
    "read_matrix",
    "write_matrix",
]


@dataclass(frozen=True)
class InstanceSpec:
    """Shape, rank, factor density and seed of a random instance."""

    m: int
    n: int
    r: int
    density: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.m < 1 or self.n < 1 or self.r < 1:
            raise ValueError("m, n, r must be positive")
        if self.r > min(self.m, self.n):
            raise ValueError(f"r={self.r} exceeds min(m, n)={min(self.m, self.n)}")
        if not 0.0 < self.density <= 1.0:
            raise ValueError("density must lie in (0, 1]")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")


@dataclass(frozen=True)
class WorstCaseSpec:
    """Parameters of the Toeplitz family on which determinant-driven local
    search attains its worst approximation ratio.  ``delta`` is the step of
    the near-singular Toeplitz matrix; the embedding pads with one extra
    column b (the row sums of the inverse block) plus zeros."""

    r: int
    delta: float
    embed_m: int | None = None
    embed_n: int | None = None

    def __post_init__(self):
        if self.r < 2:
            raise ValueError("r must be at least 2")
        if self.delta == 0.0:
            raise ValueError("delta = 0 makes the construction singular")
        if self.delta < 0.0:
            raise ValueError("delta must be positive")

    @property
    def rows(self) -> int:
        return self.embed_m if self.embed_m is not None else self.r + 1

    @property
    def cols(self) -> int:
        return self.embed_n if self.embed_n is not None else self.r + 2


def gen_rank_r(spec: InstanceSpec) -> np.ndarray:
    """Generate a dense m x n matrix of numerical rank exactly r.

    The matrix is a product L @ R of m x r and r x n factors with i.i.d.
    uniform(-1, 1) entries, each factor sparsified to ``density``, and the
    product rescaled to unit spectral norm (so the inverse problems are on
    a comparable scale across sizes).  Draws are deterministic in the seed;
    factor combinations that fail the two-sided singular-value gap
    (sigma_r/sigma_1 > 1e-6, sigma_{r+1}/sigma_1 < 1e-10) are resampled.
    """
    rng = np.random.default_rng(spec.seed)
    m, n, r = spec.m, spec.n, spec.r
    for _ in range(50):
        left = rng.uniform(-1.0, 1.0, size=(m, r))
        right = rng.uniform(-1.0, 1.0, size=(r, n))
        if spec.density < 1.0:
            left *= rng.random(size=(m, r)) < spec.density
            right *= rng.random(size=(r, n)) < spec.density
        a = left @ right
        s = np.linalg.svd(a, compute_uv=False)
        if s[0] == 0.0 or s[r - 1] <= 1e-6 * s[0]:
            continue
        if r < min(m, n) and s[r] >= 1e-10 * s[0]:
            continue
        return a / s[0]
    raise RuntimeError("could not generate a well-conditioned rank-r instance; "
                       "try a larger density or a different seed")


def worst_case_build(spec: WorstCaseSpec) -> tuple[np.ndarray, np.ndarray]:
    """Build the worst-case family: the r x r block whose inverse is the
    lower-step Toeplitz matrix, and its padded embedding [[A~, b, 0], [0, 0, 0]]
    with b = A~ @ ones.

    Returns (a_tilde, a_full).  The Toeplitz inverse has entries
    1 + max(i-j, 0)*delta and determinant (-delta)^(r-1), which is verified
    to 1e-8 relative accuracy before inverting.
    """
    r, delta = spec.r, spec.delta
    if delta >= 0.5:
        warnings.warn("delta >= 0.5 is far from the small-delta regime the family targets",
                      stacklevel=2)
    idx = np.arange(r)
    toeplitz_inv = 1.0 + delta * np.maximum(idx[:, None] - idx[None, :], 0)
    sign, logdet = np.linalg.slogdet(toeplitz_inv)
    expected = (-delta) ** (r - 1)
    det = sign * np.exp(logdet)
    if abs(det - expected) > 1e-8 * abs(expected):
        raise ArithmeticError(
            f"Toeplitz determinant {det:g} deviates from closed form {expected:g}")
    a_tilde = np.linalg.inv(toeplitz_inv)

    em, en = spec.rows, spec.cols
    if em < r:
        raise ValueError("embed_m must be at least r")
    if en < r + 1:
        raise ValueError("embed_n must be at least r + 1 to hold the extra column")
    a_full = np.zeros((em, en))
    a_full[:r, :r] = a_tilde
    a_full[:r, r] = a_tilde @ np.ones(r)
    return a_tilde, a_full


class MatrixMarketError(ValueError):
    """Malformed Matrix Market content; messages carry the offending line number."""


def _fail(lineno: int, msg: str):
    raise MatrixMarketError(f"line {lineno}: {msg}")


def read_matrix(path) -> np.ndarray:
    """Read a dense matrix from a Matrix Market file.

    Accepts ``matrix coordinate real general`` (1-based indices, duplicates
    rejected) and ``matrix array real general`` (column-major values).
    """
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        _fail(1, "empty file")
    banner = lines[0].split()
    if len(banner) != 5 or banner[0].lower() != "%%matrixmarket":
        _fail(1, "expected banner '%%MatrixMarket matrix <coordinate|array> real general'")
    obj, fmt, field, symmetry = (tok.lower() for tok in banner[1:])
    if obj != "matrix":
        _fail(1, f"unsupported object {obj!r}")
    if fmt not in ("coordinate", "array"):
        _fail(1, f"unsupported format {fmt!r}")
    if field != "real":
        _fail(1, f"unsupported field {field!r} (only 'real')")
    if symmetry != "general":
        _fail(1, f"unsupported symmetry {symmetry!r} (only 'general')")

    # line numbers are 1-based physical lines; comments/blanks may appear
    # before the size line and are skipped
    k = 1
    while k < len(lines) and (not lines[k].strip() or lines[k].lstrip().startswith("%")):
        k += 1
    if k == len(lines):
        _fail(len(lines), "missing size line")
    size_toks = lines[k].split()

    def parse_int(tok, lineno, what):
        try:
            return int(tok)
        except ValueError:
            _fail(lineno, f"invalid {what} {tok!r}")

    def parse_real(tok, lineno):
        try:
            v = float(tok)
        except ValueError:
            _fail(lineno, f"invalid real value {tok!r}")
        if not np.isfinite(v):
            _fail(lineno, f"non-finite value {tok!r}")
        return v

    if fmt == "coordinate":
        if len(size_toks) != 3:
            _fail(k + 1, "coordinate size line must be 'rows cols nnz'")
        m, n, nnz = (parse_int(t, k + 1, "size entry") for t in size_toks)
        if m < 1 or n < 1 or nnz < 0:
            _fail(k + 1, "size entries must be positive")
        a = np.zeros((m, n))
        seen = np.zeros((m, n), dtype=bool)
        count = 0
        for off in range(k + 1, len(lines)):
            line = lines[off].strip()
            if not line or line.startswith("%"):
                continue
            toks = line.split()
            if len(toks) != 3:
                _fail(off + 1, "coordinate entry must be 'i j value'")
            i = parse_int(toks[0], off + 1, "row index")
            j = parse_int(toks[1], off + 1, "column index")
            if not 1 <= i <= m:
                _fail(off + 1, f"row index {i} out of bounds [1, {m}]")
            if not 1 <= j <= n:
                _fail(off + 1, f"column index {j} out of bounds [1, {n}]")
            if seen[i - 1, j - 1]:
                _fail(off + 1, f"duplicate coordinate ({i}, {j})")
            seen[i - 1, j - 1] = True
            a[i - 1, j - 1] = parse_real(toks[2], off + 1)
            count += 1
        if count != nnz:
            _fail(len(lines), f"expected {nnz} entries, found {count}")
        return a

    if len(size_toks) != 2:
        _fail(k + 1, "array size line must be 'rows cols'")
    m, n = (parse_int(t, k + 1, "size entry") for t in size_toks)
    if m < 1 or n < 1:
        _fail(k + 1, "size entries must be positive")
    a = np.zeros((m, n))
    pos = 0
    for off in range(k + 1, len(lines)):
        line = lines[off].strip()
        if not line or line.startswith("%"):
            continue
        for tok in line.split():
            if pos >= m * n:
                _fail(off + 1, f"more than {m * n} values in array data")
            a[pos % m, pos // m] = parse_real(tok, off + 1)
            pos += 1
    if pos != m * n:
        _fail(len(lines), f"expected {m * n} values, found {pos}")
    return a


def write_matrix(path, a) -> None:
    """Write a dense matrix as 'array real general', 17 significant digits."""
    a = as_matrix(a)
    m, n = a.shape
    with open(path, "w", encoding="ascii") as fh:
        fh.write("%%MatrixMarket matrix array real general\n")
        fh.write(f"{m} {n}\n")
        for j in range(n):
            for i in range(m):
                fh.write(format(a[i, j], ".17g"))
                fh.write("\n")
