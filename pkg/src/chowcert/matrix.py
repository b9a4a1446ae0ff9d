"""Dense exact linear algebra over Z_m.

Rank, reduced row echelon form with pivot bookkeeping, kernel vectors
from the echelon data, products, and Kronecker products.  Two
interchangeable elimination/multiplication paths exist: a plain one
(`naive=True`), kept as the testing oracle, and a panel-blocked one
whose bulk updates are exact dgemm calls.  Reduced echelon form is
canonical, so both paths return bit-identical results.

Entries live in int64 arrays; moduli up to 2^31 are supported (products
are formed so that every intermediate fits the accumulator type).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import PrimeModulus, _check_same_modulus

DEFAULT_BLOCK = 64

_F64_EXACT = 2**53 - 1
_I64_MAX = 2**63 - 1
MAX_MATRIX_MODULUS = 2**31


def _mod_matmul(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """Exact (a @ b) % m for int64 operands with entries in [0, m).

    Uses float64 dgemm whenever every inner product is below 2^53 (thus
    exactly representable), falling back to chunked int64 accumulation
    otherwise.
    """
    rows, inner = a.shape
    cols = b.shape[1]
    if inner == 0 or rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=np.int64)
    bound = (m - 1) ** 2
    chunk = _F64_EXACT // bound
    if chunk >= 1:
        af = a.astype(np.float64)
        bf = b.astype(np.float64)
        if chunk >= inner:
            return (af @ bf).astype(np.int64) % m
        acc = np.zeros((rows, cols), dtype=np.int64)
        for s in range(0, inner, chunk):
            acc += (af[:, s : s + chunk] @ bf[s : s + chunk]).astype(np.int64) % m
            acc %= m
        return acc
    chunk = max(1, (_I64_MAX - m) // bound)
    acc = np.zeros((rows, cols), dtype=np.int64)
    for s in range(0, inner, chunk):
        acc = (acc + a[:, s : s + chunk] @ b[s : s + chunk]) % m
    return acc


def _matmul_naive(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """Reference product: rank-1 accumulation, reduced after every step."""
    rows, inner = a.shape
    cols = b.shape[1]
    acc = np.zeros((rows, cols), dtype=np.int64)
    for k in range(inner):
        acc = (acc + np.outer(a[:, k], b[k])) % m
    return acc


def _rref_naive(data: np.ndarray, m: int) -> tuple[np.ndarray, list[int]]:
    """Gauss-Jordan elimination, one pivot at a time over the full width."""
    a = data.copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, m) % m
        factors = a[:, c].copy()
        factors[r] = 0
        hit = np.flatnonzero(factors)
        if hit.size:
            a[hit] = (a[hit] - np.outer(factors[hit], a[r])) % m
        pivots.append(c)
        r += 1
    return a, pivots


def _reduce_i64(x: np.ndarray, m: int) -> None:
    x %= m


class _ReduceF64:
    """Exact in-place reduction for integer-valued float64 arrays.

    x % m computed as x - floor(x / m) * m with a multiply by the
    precomputed reciprocal; the rounding of the reciprocal can put the
    quotient off by at most one (the inputs are bounded well below
    2^53), which the two clamp passes repair.  Much faster than fmod.
    """

    def __init__(self, m: int):
        self.m = float(m)
        self.inv = 1.0 / m

    def __call__(self, x: np.ndarray, m: int) -> None:
        q = np.floor(x * self.inv)
        q *= self.m
        x -= q
        np.add(x, self.m, out=x, where=x < 0.0)
        np.subtract(x, self.m, out=x, where=x >= self.m)


def _rref_blocked(
    data: np.ndarray, m: int, block: int
) -> tuple[np.ndarray, list[int]]:
    """Panel-blocked elimination with deferred reduction.

    Rank-1 updates accumulate unreduced; a value is reduced mod m only
    when it is about to be read (the pivot-search column, the pivot
    row, matmul operands).  Every entry collects at most one bounded
    product per pivot per phase, so magnitudes stay below
    (2 min(rows, cols) + block + 4) m^2; when that fits the exact
    float64 range the working array is float64 and every bulk update is
    one dgemm.  Mid-range m keeps int64 accumulation, falling back to
    per-panel reduction and finally to the eager one-reduction-per-step
    variant for m near 2^31.
    """
    short = min(data.shape)
    deep_bound = (short * 2 + block + 4) * m * m
    panel_bound = (block + 2) * m * m
    if deep_bound < _F64_EXACT:
        dtype, reduce_, deep = np.float64, _ReduceF64(m), True
    elif panel_bound < _F64_EXACT:
        dtype, reduce_, deep = np.float64, _ReduceF64(m), False
    elif deep_bound < _I64_MAX:
        dtype, reduce_, deep = np.int64, _reduce_i64, True
    elif panel_bound < _I64_MAX:
        dtype, reduce_, deep = np.int64, _reduce_i64, False
    else:
        return _rref_blocked_eager(data, m, block)
    a = data.astype(dtype)
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    c0 = 0
    # Phase 1: row echelon form.  Row operations touch panel columns
    # immediately; trailing columns receive them in one matmul per
    # panel.  In deep mode trailing values stay unreduced across panels
    # (each entry collects at most one bounded product per pivot), and
    # are reduced only where read.
    while r < rows and c0 < cols:
        c1 = min(c0 + block, cols)
        nact = rows - r
        lfac = np.zeros((nact, c1 - c0), dtype=dtype)
        ninv: list[int] = []
        k = 0
        for c in range(c0, c1):
            if r + k == rows:
                break
            reduce_(a[r + k :, c], m)
            nz = np.flatnonzero(a[r + k :, c])
            if nz.size == 0:
                continue
            p = r + k + int(nz[0])
            if p != r + k:
                a[[r + k, p]] = a[[p, r + k]]
                lfac[[k, p - r]] = lfac[[p - r, k]]
            inv = pow(int(a[r + k, c]), -1, m)
            ninv.append(inv)
            reduce_(a[r + k, c:c1], m)
            a[r + k, c:c1] *= inv
            reduce_(a[r + k, c:c1], m)
            below = a[r + k + 1 :, c].copy()
            hit = np.flatnonzero(below)
            if 2 * hit.size > below.size:
                # dense column: a contiguous rank-1 update beats
                # gather/scatter on the hit rows
                a[r + k + 1 :, c:c1] -= np.multiply(
                    below[:, None], a[r + k, c:c1][None, :]
                )
            elif hit.size:
                sel = r + k + 1 + hit
                a[sel, c:c1] -= np.outer(below[hit], a[r + k, c:c1])
            lfac[k + 1 :, k] = below
            pivots.append(c)
            k += 1
        reduce_(a[r : r + k, c0:c1], m)
        if k and c1 < cols:
            trail = a[r : r + k, c1:]
            for i in range(k):
                if i:
                    trail[i] -= lfac[i, :i] @ trail[:i]
                reduce_(trail[i], m)
                trail[i] *= ninv[i]
                reduce_(trail[i], m)
            l21 = lfac[k:, :k]
            if l21.size and l21.any():
                a[r + k :, c1:] -= l21 @ trail
                if not deep:
                    reduce_(a[r + k :, c1:], m)
        r += k
        c0 = c1
    # Phase 2: clear above-pivot entries, one pivot block at a time.
    # Rows of a block have no support left of its first pivot column,
    # so all updates are restricted to columns from there on.
    nr = len(pivots)
    for i0 in reversed(range(0, nr, block)):
        i1 = min(i0 + block, nr)
        pcols = pivots[i0:i1]
        first = pcols[0]
        if deep:
            reduce_(a[i0:i1, first:], m)
        for t in range(i1 - i0 - 2, -1, -1):
            row = i0 + t
            facs = a[row, pcols[t + 1 :]]
            hit = np.flatnonzero(facs)
            if hit.size:
                sel = i0 + t + 1 + hit
                left = pcols[t + 1]
                a[row, left:] -= facs[hit] @ a[sel, left:]
                reduce_(a[row, left:], m)
        if i0:
            above = a[:i0, pcols]
            if deep:
                reduce_(above, m)
            if above.any():
                a[:i0, first:] -= above @ a[i0:i1, first:]
                if not deep:
                    reduce_(a[:i0, first:], m)
    if deep:
        reduce_(a, m)
    if dtype is np.float64:
        return a.astype(np.int64), pivots
    return a, pivots


def _rref_blocked_eager(
    data: np.ndarray, m: int, block: int
) -> tuple[np.ndarray, list[int]]:
    """Same panel scheme, reducing after every step; exact for any m < 2^31."""
    a = data.copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    c0 = 0
    while r < rows and c0 < cols:
        c1 = min(c0 + block, cols)
        nact = rows - r
        lfac = np.zeros((nact, c1 - c0), dtype=np.int64)
        ninv: list[int] = []
        k = 0
        for c in range(c0, c1):
            if r + k == rows:
                break
            nz = np.flatnonzero(a[r + k :, c])
            if nz.size == 0:
                continue
            p = r + k + int(nz[0])
            if p != r + k:
                a[[r + k, p]] = a[[p, r + k]]
                lfac[[k, p - r]] = lfac[[p - r, k]]
            inv = pow(int(a[r + k, c]), -1, m)
            ninv.append(inv)
            a[r + k, c:c1] = a[r + k, c:c1] * inv % m
            below = a[r + k + 1 :, c].copy()
            hit = np.flatnonzero(below)
            if hit.size:
                sel = r + k + 1 + hit
                a[sel, c:c1] = (a[sel, c:c1] - np.outer(below[hit], a[r + k, c:c1])) % m
            lfac[k + 1 :, k] = below
            pivots.append(c)
            k += 1
        if k and c1 < cols:
            trail = a[r : r + k, c1:]
            for i in range(k):
                if i:
                    trail[i] = (
                        trail[i] - _mod_matmul(lfac[i : i + 1, :i], trail[:i], m)[0]
                    ) % m
                trail[i] = trail[i] * ninv[i] % m
            l21 = lfac[k:, :k]
            if l21.size and l21.any():
                a[r + k :, c1:] = (a[r + k :, c1:] - _mod_matmul(l21, trail, m)) % m
        r += k
        c0 = c1
    nr = len(pivots)
    for i0 in reversed(range(0, nr, block)):
        i1 = min(i0 + block, nr)
        pcols = pivots[i0:i1]
        for t in range(i1 - i0 - 2, -1, -1):
            row = i0 + t
            facs = a[row, pcols[t + 1 :]]
            hit = np.flatnonzero(facs)
            if hit.size:
                sel = i0 + t + 1 + hit
                a[row] = (a[row] - _mod_matmul(facs[hit][None, :], a[sel], m)[0]) % m
        if i0:
            above = a[:i0, pcols]
            if above.any():
                a[:i0] = (a[:i0] - _mod_matmul(above, a[i0:i1], m)) % m
    return a, pivots


class FfMatrix:
    """Immutable dense matrix over Z_m, entries canonical in [0, m)."""

    __slots__ = ("data", "modulus")

    def __init__(self, data, modulus: PrimeModulus):
        if modulus.value >= MAX_MATRIX_MODULUS:
            raise ValueError(
                f"matrix kernels support moduli below 2^31, got {modulus.value}"
            )
        arr = np.asarray(data, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("matrix data must be two-dimensional")
        arr = arr % modulus.value
        arr.setflags(write=False)
        self.data = arr
        self.modulus = modulus

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: PrimeModulus) -> "FfMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), modulus)

    @classmethod
    def identity(cls, order: int, modulus: PrimeModulus) -> "FfMatrix":
        return cls(np.eye(order, dtype=np.int64), modulus)

    @classmethod
    def ones(cls, rows: int, cols: int, modulus: PrimeModulus) -> "FfMatrix":
        return cls(np.ones((rows, cols), dtype=np.int64), modulus)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __getitem__(self, key) -> int:
        i, j = key
        return int(self.data[i, j])

    def __eq__(self, other):
        return (
            isinstance(other, FfMatrix)
            and self.modulus == other.modulus
            and self.shape == other.shape
            and np.array_equal(self.data, other.data)
        )

    def __repr__(self):
        return f"FfMatrix({self.rows}x{self.cols} mod {self.modulus.value})"

    def is_zero(self) -> bool:
        return not self.data.any()

    def __add__(self, other: "FfMatrix") -> "FfMatrix":
        self._check_compatible(other)
        return FfMatrix(self.data + other.data, self.modulus)

    def __sub__(self, other: "FfMatrix") -> "FfMatrix":
        self._check_compatible(other)
        return FfMatrix(self.data - other.data, self.modulus)

    def scale(self, c: int) -> "FfMatrix":
        return FfMatrix(self.data * (c % self.modulus.value), self.modulus)

    def _check_compatible(self, other: "FfMatrix") -> None:
        _check_same_modulus(self.modulus, other.modulus)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    def matmul(self, other: "FfMatrix", naive: bool = False) -> "FfMatrix":
        _check_same_modulus(self.modulus, other.modulus)
        if self.cols != other.rows:
            raise ValueError(
                f"inner dimensions disagree: {self.shape} @ {other.shape}"
            )
        kernel = _matmul_naive if naive else _mod_matmul
        return FfMatrix(kernel(self.data, other.data, self.modulus.value), self.modulus)

    def __matmul__(self, other: "FfMatrix") -> "FfMatrix":
        return self.matmul(other)

    def kron(self, other: "FfMatrix") -> "FfMatrix":
        _check_same_modulus(self.modulus, other.modulus)
        return FfMatrix(np.kron(self.data, other.data), self.modulus)

    def rref(self, block: int = DEFAULT_BLOCK, naive: bool = False) -> "RrefResult":
        if naive:
            echelon, pivots = _rref_naive(self.data, self.modulus.value)
        else:
            echelon, pivots = _rref_blocked(self.data, self.modulus.value, block)
        return RrefResult(
            echelon=FfMatrix(echelon, self.modulus),
            pivot_cols=tuple(pivots),
            rank=len(pivots),
        )

    def rank(self, naive: bool = False) -> int:
        return self.rref(naive=naive).rank

    def dumps(self) -> str:
        """Debug dump: header `rows cols modulus`, then one row per line."""
        lines = [f"{self.rows} {self.cols} {self.modulus.value}"]
        for row in self.data:
            lines.append(" ".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "FfMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty matrix dump")
        rows, cols, m = (int(tok) for tok in lines[0].split())
        if len(lines) != rows + 1:
            raise ValueError(f"expected {rows} data rows, found {len(lines) - 1}")
        data = np.zeros((rows, cols), dtype=np.int64)
        for i, line in enumerate(lines[1:]):
            entries = [int(tok) for tok in line.split()]
            if len(entries) != cols:
                raise ValueError(f"row {i} has {len(entries)} entries, expected {cols}")
            data[i] = entries
        return cls(data, PrimeModulus(m))

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "FfMatrix":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.loads(fh.read())


def kronecker(a: FfMatrix, b: FfMatrix) -> FfMatrix:
    """Standard Kronecker product: block (i, j) equals a[i, j] * b."""
    return a.kron(b)


def mul_mat(a: FfMatrix, b: FfMatrix, naive: bool = False) -> FfMatrix:
    return a.matmul(b, naive=naive)


@dataclass(frozen=True)
class RrefResult:
    """Reduced row echelon form plus the pivot bookkeeping.

    Reordering columns as pivots-then-free turns the nonzero rows into
    [I_rank | X]; `permutation` records that column order.
    """

    echelon: FfMatrix
    pivot_cols: tuple[int, ...]
    rank: int

    @property
    def free_cols(self) -> tuple[int, ...]:
        pivots = set(self.pivot_cols)
        return tuple(c for c in range(self.echelon.cols) if c not in pivots)

    @property
    def permutation(self) -> tuple[int, ...]:
        return self.pivot_cols + self.free_cols

    def x_block(self) -> np.ndarray:
        """The X in [I | X]: pivot rows restricted to free columns."""
        free = list(self.free_cols)
        return self.echelon.data[: self.rank][:, free]


def rref(a: FfMatrix, block: int = DEFAULT_BLOCK, naive: bool = False) -> RrefResult:
    return a.rref(block=block, naive=naive)


def rank(a: FfMatrix, naive: bool = False) -> int:
    return a.rank(naive=naive)


def null_vector(res: RrefResult, f0) -> np.ndarray:
    """Kernel vector with -X f0 in pivot slots and f0 in free slots.

    The result is annihilated exactly by any matrix whose row space the
    echelon form came from.
    """
    m = res.echelon.modulus.value
    cols = res.echelon.cols
    c = cols - res.rank
    if c == 0:
        raise ValueError("full column rank, no normal directions")
    f0 = np.asarray([int(v) for v in f0], dtype=np.int64) % m
    if f0.shape != (c,):
        raise ValueError(f"free vector must have length {c}, got {f0.shape}")
    normal = np.zeros(cols, dtype=np.int64)
    if res.rank:
        xf = _mod_matmul(res.x_block(), f0[:, None], m)[:, 0]
        normal[list(res.pivot_cols)] = (-xf) % m
    normal[list(res.free_cols)] = f0
    return normal
