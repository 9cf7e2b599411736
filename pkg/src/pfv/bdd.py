"""Reduced ordered binary decision diagrams under a fixed variable order.

Nodes live in a single manager and are identified by integers:
``0`` and ``1`` are the terminals, every other id is an internal node
stored as ``(level, low, high)`` in parallel arrays. Public operations
take and return :class:`NodeRef` handles that remember their manager,
so handles from different managers cannot be mixed by accident.

There are no complement edges, no garbage collection and no dynamic
reordering. A manager is meant to be built, measured and thrown away.
"""
import logging


__all__ = [
    'AND', 'OR', 'XOR',
    'BddError', 'OrderError', 'ManagerMismatch', 'AssignmentError',
    'NodeBudgetExceeded',
    'VarOrder', 'NodeRef', 'BddManager', 'LevelProfile',
]

logger = logging.getLogger(__name__)

AND = 'AND'
OR = 'OR'
XOR = 'XOR'
_OPS = {AND: 0, OR: 1, XOR: 2}

_FALSE = 0
_TRUE = 1


class BddError(Exception):
    """Base class for BDD engine errors."""


class OrderError(BddError):
    """Invalid variable order, or a variable outside the order."""


class ManagerMismatch(BddError):
    """A handle was passed to a manager that does not own it."""


class AssignmentError(BddError):
    """An assignment does not cover every variable of the order."""


class NodeBudgetExceeded(BddError):
    """The manager reached its node cap."""

    def __init__(self, cap):
        super().__init__(f'node budget of {cap} internal nodes exceeded')
        self.cap = cap


class VarOrder:
    """Permutation of the variable indices ``1..n``, root level first."""

    __slots__ = ('variables', '_position')

    def __init__(self, variables):
        variables = tuple(variables)
        n = len(variables)
        for v in variables:
            if isinstance(v, bool) or not isinstance(v, int):
                raise OrderError(f'variable index must be an int, got {v!r}')
        if sorted(variables) != list(range(1, n + 1)):
            seen = set()
            for v in variables:
                if v in seen:
                    raise OrderError(f'duplicate variable {v} in order')
                if not 1 <= v <= n:
                    raise OrderError(
                        f'variable {v} out of range 1..{n}')
                seen.add(v)
        self.variables = variables
        self._position = {v: i for i, v in enumerate(variables)}

    def __len__(self):
        return len(self.variables)

    def __iter__(self):
        return iter(self.variables)

    def __eq__(self, other):
        if not isinstance(other, VarOrder):
            return NotImplemented
        return self.variables == other.variables

    def __hash__(self):
        return hash(self.variables)

    def __repr__(self):
        return f'VarOrder({list(self.variables)})'

    def position(self, var):
        """Return the 0-based level of variable `var`."""
        try:
            return self._position[var]
        except KeyError:
            raise OrderError(f'variable {var!r} is not in the order') from None

    def variable(self, level):
        return self.variables[level]


class LevelProfile(tuple):
    """Internal node counts per level, root level first."""

    __slots__ = ()

    @property
    def total(self):
        return sum(self)

    def __repr__(self):
        return f'LevelProfile({list(self)})'


class NodeRef:
    """Handle to a node owned by one :class:`BddManager`.

    Two handles are equal iff they belong to the same manager and name
    the same node, which (by canonicity) means they denote the same
    Boolean function.
    """

    __slots__ = ('manager', 'id')

    def __init__(self, manager, id):
        self.manager = manager
        self.id = id

    def __eq__(self, other):
        if not isinstance(other, NodeRef):
            return NotImplemented
        return self.manager is other.manager and self.id == other.id

    def __hash__(self):
        return hash((id(self.manager), self.id))

    def __repr__(self):
        if self.id == _FALSE:
            return 'NodeRef(ZERO)'
        if self.id == _TRUE:
            return 'NodeRef(ONE)'
        return f'NodeRef({self.id})'

    @property
    def is_terminal(self):
        return self.id <= _TRUE

    def __and__(self, other):
        return self.manager.apply(AND, self, other)

    def __or__(self, other):
        return self.manager.apply(OR, self, other)

    def __xor__(self, other):
        return self.manager.apply(XOR, self, other)

    def __invert__(self):
        return self.manager.negate(self)


class BddManager:
    """Unique table, apply cache and node store for one variable order.

    `node_cap` bounds the number of internal nodes ever created;
    exceeding it raises :class:`NodeBudgetExceeded`. The apply cache is
    never evicted.
    """

    def __init__(self, order, node_cap=None):
        if not isinstance(order, VarOrder):
            order = VarOrder(order)
        self.order = order
        self.node_cap = node_cap
        n = len(order)
        # terminals sit below every variable level
        self._level = [n, n]
        self._low = [-1, -1]
        self._high = [-1, -1]
        self._unique = {}
        self._cache = {}
        self.zero = NodeRef(self, _FALSE)
        self.one = NodeRef(self, _TRUE)

    def __len__(self):
        """Number of internal nodes stored in this manager."""
        return len(self._level) - 2

    def __repr__(self):
        return f'BddManager({self.order!r}, nodes={len(self)})'

    @property
    def stats(self):
        return {
            'nodes': len(self),
            'unique_table': len(self._unique),
            'apply_cache': len(self._cache),
        }

    # -- handles ---------------------------------------------------------

    def _id(self, f):
        if not isinstance(f, NodeRef):
            raise TypeError(f'expected NodeRef, got {type(f).__name__}')
        if f.manager is not self:
            raise ManagerMismatch('handle belongs to a different manager')
        return f.id

    def _ref(self, u):
        if u == _FALSE:
            return self.zero
        if u == _TRUE:
            return self.one
        return NodeRef(self, u)

    def constant(self, value):
        return self.one if value else self.zero

    def _mk(self, level, low, high):
        if low == high:
            return low
        key = (level, low, high)
        u = self._unique.get(key)
        if u is not None:
            return u
        if self.node_cap is not None and len(self._level) - 2 >= self.node_cap:
            raise NodeBudgetExceeded(self.node_cap)
        u = len(self._level)
        self._level.append(level)
        self._low.append(low)
        self._high.append(high)
        self._unique[key] = u
        return u

    def node(self, f):
        """Return ``(var, low, high)`` of internal node `f`."""
        u = self._id(f)
        if u <= _TRUE:
            raise ValueError('terminal nodes have no children')
        return (self.order.variable(self._level[u]),
                self._ref(self._low[u]), self._ref(self._high[u]))

    def var(self, i):
        """Projection function of variable `i`."""
        level = self.order.position(i)
        return self._ref(self._mk(level, _FALSE, _TRUE))

    # -- Boolean operations ----------------------------------------------

    def apply(self, op, f, g):
        """Combine `f` and `g` with `op`, one of AND, OR, XOR."""
        try:
            code = _OPS[op]
        except KeyError:
            raise ValueError(f'unknown operator {op!r}') from None
        u = self._id(f)
        v = self._id(g)
        return self._ref(self._apply(code, u, v))

    def negate(self, f):
        return self._ref(self._apply(_OPS[XOR], self._id(f), _TRUE))

    def _apply(self, op, f, g):
        # explicit stack: depth is bounded by the number of levels, which
        # may exceed the interpreter's recursion limit
        level = self._level
        low = self._low
        high = self._high
        cache = self._cache
        mk = self._mk
        out = []
        stack = [(f, g, None)]
        push = stack.append
        pop = stack.pop
        while stack:
            f, g, key = pop()
            if key is not None:
                hi = out.pop()
                lo = out.pop()
                r = mk(key[3], lo, hi)
                cache[key[:3]] = r
                out.append(r)
                continue
            if f > g:
                f, g = g, f
            # terminal cases, with f <= g
            if op == 0:
                if f == _FALSE or f == g:
                    out.append(f)
                    continue
                if f == _TRUE:
                    out.append(g)
                    continue
            elif op == 1:
                if f == _TRUE:
                    out.append(_TRUE)
                    continue
                if f == _FALSE or f == g:
                    out.append(g)
                    continue
            else:
                if f == g:
                    out.append(_FALSE)
                    continue
                if f == _FALSE:
                    out.append(g)
                    continue
                if g == _TRUE:
                    # f is the other terminal here
                    out.append(_FALSE if f == _TRUE else _TRUE)
                    continue
            k = (op, f, g)
            r = cache.get(k)
            if r is not None:
                out.append(r)
                continue
            lf = level[f]
            lg = level[g]
            if lf <= lg:
                top = lf
                f0, f1 = low[f], high[f]
            else:
                top = lg
                f0 = f1 = f
            if lg <= lf:
                g0, g1 = low[g], high[g]
            else:
                g0 = g1 = g
            push((f, g, (op, f, g, top)))
            push((f1, g1, None))
            push((f0, g0, None))
        return out[0]

    def cofactor(self, f, i, value):
        """Restrict variable `i` of `f` to the constant `value`."""
        u = self._id(f)
        target = self.order.position(i)
        level = self._level
        low = self._low
        high = self._high
        memo = {}
        out = []
        stack = [(u, False)]
        while stack:
            w, combine = stack.pop()
            if combine:
                hi = out.pop()
                lo = out.pop()
                r = self._mk(level[w], lo, hi)
                memo[w] = r
                out.append(r)
                continue
            lw = level[w]
            if lw > target:
                out.append(w)
                continue
            if w in memo:
                out.append(memo[w])
                continue
            if lw == target:
                r = high[w] if value else low[w]
                memo[w] = r
                out.append(r)
                continue
            stack.append((w, True))
            stack.append((high[w], False))
            stack.append((low[w], False))
        return self._ref(out[0])

    # -- queries ---------------------------------------------------------

    def evaluate(self, f, assignment):
        """Evaluate `f` under `assignment`, a mapping variable -> bit."""
        u = self._id(f)
        missing = [v for v in self.order.variables if v not in assignment]
        if missing:
            raise AssignmentError(f'assignment lacks variables {missing}')
        variables = self.order.variables
        while u > _TRUE:
            if assignment[variables[self._level[u]]]:
                u = self._high[u]
            else:
                u = self._low[u]
        return u

    def _reachable(self, u):
        seen = set()
        stack = [u]
        while stack:
            w = stack.pop()
            if w <= _TRUE or w in seen:
                continue
            seen.add(w)
            stack.append(self._low[w])
            stack.append(self._high[w])
        return seen

    def internal_node_count(self, f):
        """Number of distinct non-terminal nodes reachable from `f`."""
        return len(self._reachable(self._id(f)))

    def level_profile(self, f):
        counts = [0] * len(self.order)
        for w in self._reachable(self._id(f)):
            counts[self._level[w]] += 1
        return LevelProfile(counts)

    def support(self, f):
        """Set of variables that `f` depends on."""
        levels = {self._level[w] for w in self._reachable(self._id(f))}
        return {self.order.variable(i) for i in levels}


def new_manager(order, node_cap=None):
    return BddManager(order, node_cap=node_cap)
