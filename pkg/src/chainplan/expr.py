"""Expression trees for polynomial coefficients of the triangular systems.

Trees are the JSON-compatible exchange format between the offline
precomputation tool and this runtime.  Node forms:

* ``["rat", "p", "q"]``   exact rational constant, decimal strings
* ``"x0_2"``              parameter or previously solved unknown symbol
* ``["+", a, b, ...]``    sum, evaluated left to right
* ``["-", a, b]``         difference (or ``["-", a]`` for negation)
* ``["*", a, b, ...]``    product, evaluated left to right
* ``["/", a, b]``         quotient
* ``["^", a, k]``         integer power, ``k`` a plain int
"""

from __future__ import annotations

from fractions import Fraction


class UnboundSymbolError(KeyError):
    """A tree references a symbol missing from the evaluation environment."""


def eval_expr(tree, env: dict[str, float]) -> float:
    """Reference interpreter: IEEE doubles, left-to-right association."""
    if isinstance(tree, str):
        try:
            return env[tree]
        except KeyError:
            raise UnboundSymbolError(tree) from None
    if isinstance(tree, (int, float)):
        return float(tree)
    op = tree[0]
    if op == "rat":
        return int(tree[1]) / int(tree[2])
    args = tree[1:]
    if op == "+":
        acc = eval_expr(args[0], env)
        for a in args[1:]:
            acc = acc + eval_expr(a, env)
        return acc
    if op == "-":
        if len(args) == 1:
            return -eval_expr(args[0], env)
        return eval_expr(args[0], env) - eval_expr(args[1], env)
    if op == "*":
        acc = eval_expr(args[0], env)
        for a in args[1:]:
            acc = acc * eval_expr(a, env)
        return acc
    if op == "/":
        return eval_expr(args[0], env) / eval_expr(args[1], env)
    if op == "^":
        return eval_expr(args[0], env) ** int(args[1])
    raise ValueError(f"unknown expression node {op!r}")


def tree_symbols(tree) -> set[str]:
    if isinstance(tree, str):
        return {tree}
    if isinstance(tree, (int, float)):
        return set()
    if tree[0] == "rat":
        return set()
    if tree[0] == "^":
        return tree_symbols(tree[1])
    out: set[str] = set()
    for a in tree[1:]:
        out |= tree_symbols(a)
    return out


def validate_tree(tree, allowed: set[str] | None = None) -> None:
    """Structural check: known node kinds, integer powers, bound symbols."""
    if isinstance(tree, str):
        if allowed is not None and tree not in allowed:
            raise ValueError(f"symbol {tree!r} not allowed here")
        return
    if isinstance(tree, (int, float)):
        return
    if not isinstance(tree, (list, tuple)) or not tree:
        raise ValueError(f"malformed expression node {tree!r}")
    op = tree[0]
    if op == "rat":
        if len(tree) != 3:
            raise ValueError("rat node needs numerator and denominator")
        try:
            Fraction(int(tree[1]), int(tree[2]))
        except (ZeroDivisionError, TypeError) as exc:
            raise ValueError(f"bad rational node {tree!r}: {exc}") from None
        return
    if op == "^":
        if len(tree) != 3 or not isinstance(tree[2], int):
            raise ValueError("power node needs an integer exponent")
        validate_tree(tree[1], allowed)
        return
    if op in ("+", "-", "*", "/"):
        if len(tree) < 2 or (op == "/" and len(tree) != 3):
            raise ValueError(f"bad arity for {op!r} node")
        for a in tree[1:]:
            validate_tree(a, allowed)
        return
    raise ValueError(f"unknown expression node {op!r}")


# Sums/products wider than this are emitted as accumulator statements:
# Python parses a chain of one operator into a left-deep syntax tree whose
# depth grows with the term count, and very wide polynomial coefficients
# (thousands of monomials) overflow the compiler's recursion limit.
WIDE_NODE_CHUNK = 256


def compile_tree(tree):
    """Compile a tree to a fast ``f(env) -> float`` closure.

    The generated code mirrors the interpreter's association exactly
    (chunked accumulators still fold strictly left to right), so the
    compiled form returns bit-identical results to :func:`eval_expr`.
    """
    validate_tree(tree)
    lines: list[str] = []
    counter = [0]
    symbols: set[str] = set()

    def emit(node) -> str:
        if isinstance(node, str):
            symbols.add(node)
            return f"_s_{node}"
        if isinstance(node, (int, float)):
            return repr(float(node))
        op = node[0]
        if op == "rat":
            p, q = int(node[1]), int(node[2])
            if q == 1:
                return repr(float(p))
            return f"({p}/{q})"
        if op == "^":
            return f"({emit(node[1])})**{int(node[2])}"
        if op == "-" and len(node) == 2:
            return f"(-{emit(node[1])})"
        args = [f"({emit(a)})" for a in node[1:]]
        if op in ("+", "*") and len(args) > WIDE_NODE_CHUNK:
            var = f"_v{counter[0]}"
            counter[0] += 1
            lines.append(f"{var} = " + op.join(args[:WIDE_NODE_CHUNK]))
            for i in range(WIDE_NODE_CHUNK, len(args), WIDE_NODE_CHUNK):
                chunk = op.join(args[i:i + WIDE_NODE_CHUNK])
                lines.append(f"{var} = {var} {op} {chunk}")
            return var
        sep = {"+": "+", "-": "-", "*": "*", "/": "/"}[op]
        return sep.join(args)

    expr = emit(tree)
    # symbol values are hoisted into locals once per call: local loads are
    # far cheaper than dict subscripts inside wide polynomial bodies
    prologue = [f"_s_{name} = env[{name!r}]" for name in sorted(symbols)]
    body = "\n    ".join(prologue + lines + [f"return ({expr})"])
    src = f"def _compiled(env):\n    {body}"
    namespace: dict = {}
    exec(compile(src, "<expr-tree>", "exec"), namespace)
    return namespace["_compiled"]


# Sums with at least this many monomial terms get the vectorized evaluator.
WIDE_POLY_TERMS = 64


def _as_monomial(node):
    """``(coefficient, {symbol: exponent})`` for a product-form term."""
    if isinstance(node, str):
        return 1.0, {node: 1}
    if isinstance(node, (int, float)):
        return float(node), {}
    if not isinstance(node, (list, tuple)) or not node:
        return None
    op = node[0]
    if op == "rat":
        return int(node[1]) / int(node[2]), {}
    if op == "^" and isinstance(node[1], str) and isinstance(node[2], int) \
            and node[2] >= 0:
        return 1.0, {node[1]: node[2]}
    if op == "-" and len(node) == 2:
        sub = _as_monomial(node[1])
        if sub is None:
            return None
        return -sub[0], sub[1]
    if op == "*":
        coeff, exps = 1.0, {}
        for a in node[1:]:
            sub = _as_monomial(a)
            if sub is None:
                return None
            coeff *= sub[0]
            for s, e in sub[1].items():
                exps[s] = exps.get(s, 0) + e
        return coeff, exps
    return None


def compile_polynomial(tree):
    """Fast ``f(env) -> float`` for polynomial coefficient trees.

    Wide monomial sums are evaluated through per-symbol power tables and a
    vectorized term product/sum.  That changes the floating-point summation
    order relative to :func:`eval_expr` (numpy's pairwise summation is at
    least as accurate as a sequential fold), so this is meant for
    root-finding coefficients where only the polynomial's value matters, not
    where bit-identical interpretation is required.  Anything that is not a
    wide sum of monomials falls back to :func:`compile_tree`.
    """
    validate_tree(tree)
    if not (isinstance(tree, (list, tuple)) and tree and tree[0] == "+"
            and len(tree) - 1 >= WIDE_POLY_TERMS):
        return compile_tree(tree)
    monomials = [_as_monomial(a) for a in tree[1:]]
    if any(m is None for m in monomials):
        return compile_tree(tree)

    import numpy as np

    symbols = sorted({s for _, exps in monomials for s in exps})
    coeffs = np.array([c for c, _ in monomials])
    columns = []
    for s in symbols:
        col = np.array([exps.get(s, 0) for _, exps in monomials])
        columns.append((s, col, np.arange(int(col.max()) + 1)))

    def evaluate(env: dict[str, float]) -> float:
        vals = coeffs.copy()
        for s, col, degrees in columns:
            try:
                base = env[s]
            except KeyError:
                raise UnboundSymbolError(s) from None
            vals *= (base ** degrees)[col]
        return float(vals.sum())

    return evaluate


def rational_tree(p: int, q: int = 1) -> list:
    return ["rat", str(p), str(q)]
