"""Bitmask kernels for sweeping law instances over all small relations.

A relation on a carrier of size m is packed into an m*m-bit integer (bit
x*m+y set when the pair (x,y) is present), so the whole of Rel(X) for
m <= 3 is the range 0..2**(m*m)-1 and the operations become table lookups
plus bit arithmetic:

    composition        comp[a, b]                       (precomputed)
    demonic comp.      comp[a, b] restricted to the rows of a that map
                       into dom(b) — safe[a, dommask[b]] picks the rows
    union              a | b
    demonic join       (a | b) restricted to dom(a) & dom(b)
    partial product    comp[a, b] when ran(a) is inside dom(b), else a
                       sentinel (index N) that every operation propagates

Formulas compile to flat postfix programs; the assignment space (tuples of
pool indices, variable 0 most significant, so assignment order is
lexicographic) is scanned either by a numba-compiled loop or by a chunked
numpy evaluator.  Both return the first failing assignment index and the
number of assignments examined, and always agree; RELIC_KERNEL selects
numba, numpy or python (the python reference evaluator lives in terms.py
and is picked by the caller).  Tables exist for m <= 3 only — larger
carriers fall back to the reference path.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .relations import StateSpace, fail_all, mask_of
from .terms import Const, Formula, Var

MAX_TABLE_CARRIER = 3

# opcodes
_K_LOAD = 0
_K_CONST = 1
_K_OPS = {";": 2, "*": 3, "|": 4, "||": 5, ".": 6}
_K_ATOMS = {"=": 7, "<=": 8, "[=": 9, "ex": 10}


def kernel_choice() -> str:
    """numba | numpy | python, from RELIC_KERNEL or availability."""
    env = os.environ.get("RELIC_KERNEL")
    if env:
        if env not in ("numba", "numpy", "python"):
            raise ValueError(f"RELIC_KERNEL={env!r}: want numba, numpy or python")
        return env
    try:
        import numba  # noqa: F401
    except ImportError:
        return "numpy"
    return "numba"


@dataclass(frozen=True)
class Tables:
    m: int
    N: int  # sentinel index; valid masks are 0..N-1
    comp: np.ndarray      # (N, N) composition
    dommask: np.ndarray   # (N,) m-bit domain mask
    ranmask: np.ndarray   # (N,) m-bit range mask
    expand: np.ndarray    # (2^m,) domain mask -> full rows at those points
    safe: np.ndarray      # (N, 2^m) rows of a mapping inside a domain mask
    mrows: int            # (1 << m) - 1
    fullmask: int         # N - 1


@lru_cache(maxsize=None)
def tables(m: int) -> Tables:
    if not 1 <= m <= MAX_TABLE_CARRIER:
        raise ValueError(f"kernel tables cover carriers of size 1..3, not {m}")
    N = 1 << (m * m)
    masks = np.arange(N, dtype=np.int64)
    rows = np.empty((N, m), dtype=np.int64)
    for x in range(m):
        rows[:, x] = (masks >> (x * m)) & ((1 << m) - 1)
    dommask = np.zeros(N, np.int64)
    ranmask = np.zeros(N, np.int64)
    for x in range(m):
        dommask |= (rows[:, x] != 0).astype(np.int64) << x
        ranmask |= rows[:, x]
    comp = np.zeros((N, N), np.int64)
    for x in range(m):
        acc = np.zeros((N, N), np.int64)
        for z in range(m):
            has = ((rows[:, x] >> z) & 1).astype(bool)
            acc |= np.where(has[:, None], rows[None, :, z], 0)
        comp |= acc << (x * m)
    expand = np.zeros(1 << m, np.int64)
    for d in range(1 << m):
        e = 0
        for x in range(m):
            if d >> x & 1:
                e |= ((1 << m) - 1) << (x * m)
        expand[d] = e
    domains = np.arange(1 << m, dtype=np.int64)
    safe = np.zeros((N, 1 << m), np.int64)
    for x in range(m):
        inside = (rows[:, x][:, None] & ~domains[None, :]) == 0
        safe |= inside.astype(np.int64) << x
    return Tables(m, N, comp, dommask, ranmask, expand, safe,
                  (1 << m) - 1, N - 1)


def pool_masks(domain: str, space: StateSpace) -> np.ndarray:
    """Sorted masks of the quantification pool for a domain tag."""
    m = space.size
    if m > 4:
        raise ValueError(f"carrier of size {m} is beyond the sweep limit")
    N = 1 << (m * m)
    masks = np.arange(N, dtype=np.int64)
    if domain == "REL":
        return masks
    rows = [(masks >> (x * m)) & ((1 << m) - 1) for x in range(m)]
    if domain == "LTREL":
        keep = np.ones(N, bool)
        for x in range(m):
            keep &= rows[x] != 0
        return masks[keep]
    if domain == "TOTAL":
        keep = np.ones(N, bool)
        ran = np.zeros(N, np.int64)
        for x in range(m):
            keep &= rows[x] != 0
            ran |= rows[x]
        return masks[keep & (ran == (1 << m) - 1)]
    if domain == "LTREL0":
        if not space.has_fail:
            raise ValueError("LTREL0 needs a fail-extended space")
        f = space.fail_index
        keep = rows[f] == (1 << f)  # the fail row is exactly the fail loop
        for x in range(m):
            if x != f:
                keep &= rows[x] != 0
        return masks[keep]
    raise ValueError(f"unknown domain {domain!r}")


@dataclass(frozen=True)
class Compiled:
    space: StateSpace
    variables: tuple[str, ...]
    code_kind: np.ndarray
    code_arg: np.ndarray
    n_ant: int
    n_atoms: int


def compile_formula(formula: Formula, space: StateSpace) -> Compiled:
    variables = formula.variables()
    slot = {v: i for i, v in enumerate(variables)}
    m = space.size
    kinds: list[int] = []
    args: list[int] = []

    def const_mask(kind: str) -> int:
        if kind == "empty":
            return 0
        if kind == "full":
            return (1 << (m * m)) - 1
        if kind == "identity":
            return sum(1 << (x * m + x) for x in range(m))
        if not space.has_fail:
            raise ValueError(
                "constant Z (all-fail) needs a fail state; use the LTREL0 domain")
        return mask_of(fail_all(space))

    def emit(t):
        if isinstance(t, Var):
            kinds.append(_K_LOAD)
            args.append(slot[t.name])
        elif isinstance(t, Const):
            kinds.append(_K_CONST)
            args.append(const_mask(t.kind))
        else:
            emit(t.left)
            emit(t.right)
            kinds.append(_K_OPS[t.sym])
            args.append(0)

    for atom in formula.antecedent + formula.consequent:
        emit(atom.left)
        if atom.right is not None:
            emit(atom.right)
        kinds.append(_K_ATOMS[atom.kind])
        args.append(0)

    return Compiled(space, variables,
                    np.asarray(kinds, np.int64), np.asarray(args, np.int64),
                    len(formula.antecedent),
                    len(formula.antecedent) + len(formula.consequent))


# -- the scalar scan (plain python, doubles as the numba kernel body) --------

def _scan_loop(code_kind, code_arg, n_ant, pool, k,
               comp, dommask, ranmask, expand, safe,
               N, mrows, fullmask, start, stop):
    stack = np.zeros(64, np.int64)
    digits = np.zeros(k + 1, np.int64)
    P = pool.shape[0]
    ncode = code_kind.shape[0]
    count = 0
    for ai in range(start, stop):
        rem = ai
        for v in range(k - 1, -1, -1):
            digits[v] = rem % P
            rem //= P
        count += 1
        sp = 0
        atom_i = 0
        ants_hold = True
        holds = True
        pc = 0
        while pc < ncode:
            kd = code_kind[pc]
            if kd == 0:
                stack[sp] = pool[digits[code_arg[pc]]]
                sp += 1
            elif kd == 1:
                stack[sp] = code_arg[pc]
                sp += 1
            elif kd <= 6:
                b = stack[sp - 1]
                a = stack[sp - 2]
                sp -= 1
                if a == N or b == N:
                    r = N
                elif kd == 2:
                    r = comp[a, b]
                elif kd == 3:
                    r = comp[a, b] & expand[safe[a, dommask[b]]]
                elif kd == 4:
                    r = a | b
                elif kd == 5:
                    r = (a | b) & expand[dommask[a] & dommask[b]]
                elif (ranmask[a] & ~dommask[b] & mrows) != 0:
                    r = N
                else:
                    r = comp[a, b]
                stack[sp - 1] = r
            else:
                if kd == 10:
                    a = stack[sp - 1]
                    sp -= 1
                    res = a != N
                else:
                    b = stack[sp - 1]
                    a = stack[sp - 2]
                    sp -= 2
                    if a == N or b == N:
                        res = False
                    elif kd == 7:
                        res = a == b
                    elif kd == 8:
                        res = (a & ~b & fullmask) == 0
                    else:
                        db = dommask[b]
                        res = (db & ~dommask[a] & mrows) == 0 and \
                              (a & expand[db] & ~b & fullmask) == 0
                if atom_i < n_ant:
                    if not res:
                        ants_hold = False
                        break
                elif not res:
                    holds = False
                    break
                atom_i += 1
            pc += 1
        if ants_hold and not holds:
            return ai, count
    return -1, count


_JITTED = None


def _jitted_scan():
    global _JITTED
    if _JITTED is None:
        from numba import njit
        _JITTED = njit(cache=True)(_scan_loop)
    return _JITTED


def _scan_numpy(code_kind, code_arg, n_ant, pool, k, T,
                start, stop, chunk=1 << 15):
    n_atoms = int((code_kind >= 7).sum())
    P = len(pool)
    count = 0
    for lo in range(start, stop, chunk):
        hi = min(lo + chunk, stop)
        idxs = np.arange(lo, hi, dtype=np.int64)
        vals = []
        for v in range(k):
            digit = (idxs // P ** (k - 1 - v)) % P
            vals.append(pool[digit])
        stack: list[np.ndarray] = []
        atoms: list[np.ndarray] = []
        for pc in range(len(code_kind)):
            kd = int(code_kind[pc])
            if kd == 0:
                stack.append(vals[int(code_arg[pc])])
            elif kd == 1:
                stack.append(np.full(hi - lo, int(code_arg[pc]), np.int64))
            elif kd <= 6:
                b = stack.pop()
                a = stack.pop()
                stack.append(_numpy_binop(kd, a, b, T))
            elif kd == 10:
                atoms.append(stack.pop() != T.N)
            else:
                b = stack.pop()
                a = stack.pop()
                atoms.append(_numpy_atom(kd, a, b, T))
        ants = np.ones(hi - lo, bool)
        for r in atoms[:n_ant]:
            ants &= r
        cons = np.ones(hi - lo, bool)
        for r in atoms[n_ant:n_atoms]:
            cons &= r
        bad = ants & ~cons
        if bad.any():
            first = int(np.argmax(bad))
            return lo + first, count + first + 1
        count += hi - lo
    return -1, count


def _numpy_binop(kd, a, b, T):
    undef = (a == T.N) | (b == T.N)
    ac = np.where(undef, 0, a)
    bc = np.where(undef, 0, b)
    if kd == 2:
        val = T.comp[ac, bc]
    elif kd == 3:
        val = T.comp[ac, bc] & T.expand[T.safe[ac, T.dommask[bc]]]
    elif kd == 4:
        val = ac | bc
    elif kd == 5:
        val = (ac | bc) & T.expand[T.dommask[ac] & T.dommask[bc]]
    else:
        gap = (T.ranmask[ac] & ~T.dommask[bc] & T.mrows) != 0
        val = np.where(gap, T.N, T.comp[ac, bc])
    return np.where(undef, T.N, val)


def _numpy_atom(kd, a, b, T):
    defined = (a != T.N) & (b != T.N)
    ac = np.where(defined, a, 0)
    bc = np.where(defined, b, 0)
    if kd == 7:
        res = ac == bc
    elif kd == 8:
        res = (ac & ~bc & T.fullmask) == 0
    else:
        db = T.dommask[bc]
        res = ((db & ~T.dommask[ac] & T.mrows) == 0) & \
              ((ac & T.expand[db] & ~bc & T.fullmask) == 0)
    return res & defined


def run_exhaustive(compiled: Compiled, pool: np.ndarray, path: str,
                   start: int = 0, stop: int | None = None) -> tuple[int, int]:
    """Scan assignments [start, stop); (first failing index or -1, examined).

    ``path`` is "numba" or "numpy"; the caller handles the python reference
    path and carriers beyond the table limit.
    """
    T = tables(compiled.space.size)
    k = len(compiled.variables)
    if stop is None:
        stop = len(pool) ** k
    args = (compiled.code_kind, compiled.code_arg, compiled.n_ant,
            np.asarray(pool, np.int64), k,
            T.comp, T.dommask, T.ranmask, T.expand, T.safe,
            T.N, T.mrows, T.fullmask, start, stop)
    if path == "numba":
        fail, count = _jitted_scan()(*args)
        return int(fail), int(count)
    if path == "numpy":
        return _scan_numpy(compiled.code_kind, compiled.code_arg,
                           compiled.n_ant, np.asarray(pool, np.int64), k, T,
                           start, stop)
    raise ValueError(f"unknown kernel path {path!r}")
