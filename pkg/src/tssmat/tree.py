"""
Rooted trees over 1-based node ids.

A :class:`RootedTree` is an undirected connected acyclic graph on the nodes
``1..K`` together with a chosen root. All derived maps (parent, children,
levels, descendant sets) are computed once at construction time and the
object is treated as immutable afterwards.

Children are always listed in ascending node id. The construction and
matvec sweeps iterate children in this order, so it fixes the column
grouping used throughout the package.
"""

from collections import deque
from functools import cached_property

from .errors import BadLeafCount, BadNodeId, CycleDetected, DisconnectedGraph, NotATreeEdge


class RootedTree:
    """
    Connected acyclic undirected graph with a chosen root.

    Parameters
    ----------
    K : int
        Number of nodes; node ids are ``1..K``.
    edges : iterable of (int, int)
        Undirected edges.
    root : int
        Root node id.

    Attributes
    ----------
    K : int
    root : int
    edges : tuple of (int, int)
        Undirected edges normalised to ``(min, max)`` and sorted.
    parent : dict
        ``parent[i]`` is the parent id, or ``None`` for the root.
    children : dict
        ``children[i]`` is a tuple of child ids in ascending order.
    level : dict
        Distance from the root.
    levels : list of tuple
        ``levels[l]`` lists the nodes at level ``l`` in ascending order.
    """

    def __init__(self, K, edges, root):
        K = int(K)
        if K < 1:
            raise BadNodeId(f"node count must be positive, got {K}")
        self.K = K
        self._check_id(root)
        self.root = int(root)

        seen = set()
        adj = {i: [] for i in range(1, K + 1)}
        for e in edges:
            a, b = (int(v) for v in e)
            self._check_id(a)
            self._check_id(b)
            if a == b:
                raise CycleDetected(f"self loop at node {a}")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise CycleDetected(f"duplicate edge {key}")
            seen.add(key)
            adj[a].append(b)
            adj[b].append(a)

        if len(seen) > K - 1:
            raise CycleDetected(f"{len(seen)} edges on {K} nodes; a tree has {K - 1}")
        self.edges = tuple(sorted(seen))
        self._edge_set = frozenset(seen)
        self._adj = {i: tuple(sorted(v)) for i, v in adj.items()}

        parent = {self.root: None}
        level = {self.root: 0}
        order = []
        queue = deque([self.root])
        while queue:
            i = queue.popleft()
            order.append(i)
            for j in self._adj[i]:
                if j not in level:
                    level[j] = level[i] + 1
                    parent[j] = i
                    queue.append(j)
        if len(order) != K:
            missing = sorted(set(range(1, K + 1)) - set(order))
            raise DisconnectedGraph(f"nodes {missing} are not reachable from root {self.root}")

        self.parent = parent
        self.level = level
        self.children = {i: tuple(j for j in self._adj[i] if parent.get(j) == i) for i in range(1, K + 1)}
        depth = max(level.values())
        self.levels = [tuple(sorted(i for i in level if level[i] == l)) for l in range(depth + 1)]

    def _check_id(self, i):
        if isinstance(i, bool) or not hasattr(i, "__index__"):
            raise BadNodeId(f"node id {i!r} is not an integer")
        if not 1 <= int(i) <= self.K:
            raise BadNodeId(f"node id {i} outside 1..{self.K}")

    def __repr__(self):
        return f"RootedTree(K={self.K}, edges={list(self.edges)}, root={self.root})"

    def __eq__(self, other):
        if not isinstance(other, RootedTree):
            return NotImplemented
        return (self.K, self.edges, self.root) == (other.K, other.edges, other.root)

    def __hash__(self):
        return hash((self.K, self.edges, self.root))

    @property
    def nodes(self):
        return range(1, self.K + 1)

    @property
    def depth(self):
        return len(self.levels) - 1

    def neighbors(self, i):
        """Adjacent nodes of ``i`` in ascending order."""
        self._check_id(i)
        return self._adj[i]

    def siblings(self, i):
        self._check_id(i)
        p = self.parent[i]
        if p is None:
            return ()
        return tuple(j for j in self.children[p] if j != i)

    def grandparent(self, i):
        p = self.parent[i]
        return None if p is None else self.parent[p]

    @cached_property
    def leaves(self):
        return frozenset(i for i in self.nodes if not self.children[i])

    @cached_property
    def _descendants(self):
        desc = {}
        for l in reversed(self.levels):
            for i in l:
                s = {i}
                for c in self.children[i]:
                    s |= desc[c]
                desc[i] = frozenset(s)
        return desc

    def descendants(self, i):
        """Descendants of ``i`` including ``i`` itself, ascending."""
        self._check_id(i)
        return tuple(sorted(self._descendants[i]))

    def complement(self, nodes):
        """Nodes not in ``nodes``, ascending."""
        s = set(nodes)
        return tuple(i for i in self.nodes if i not in s)

    def path_between(self, i, j):
        """Unique simple path ``[i, ..., j]``."""
        self._check_id(i)
        self._check_id(j)
        up_i, up_j = [i], [j]
        a, b = i, j
        while self.level[a] > self.level[b]:
            a = self.parent[a]
            up_i.append(a)
        while self.level[b] > self.level[a]:
            b = self.parent[b]
            up_j.append(b)
        while a != b:
            a = self.parent[a]
            b = self.parent[b]
            up_i.append(a)
            up_j.append(b)
        # both lists end at the common ancestor
        return up_i + up_j[-2::-1]

    def is_edge(self, i, j):
        return (min(i, j), max(i, j)) in self._edge_set

    def directed_edges(self):
        """All ordered pairs ``(i, j)`` with ``{i, j}`` a tree edge, sorted."""
        out = []
        for a, b in self.edges:
            out.append((a, b))
            out.append((b, a))
        return sorted(out)

    def is_up_edge(self, e):
        """True if ``e = (i, j)`` points from child ``i`` to its parent ``j``."""
        i, j = e
        if not self.is_edge(i, j):
            raise NotATreeEdge(f"{e} is not an edge of the tree")
        return self.parent[i] == j

    def up_edges_bottom_up(self):
        """Up-edges ``(i, parent(i))`` ordered deepest level first."""
        return [(i, self.parent[i]) for l in reversed(self.levels[1:]) for i in l]

    def down_edges_top_down(self):
        """Down-edges ``(parent(i), i)`` ordered shallowest level first."""
        return [(self.parent[i], i) for l in self.levels[1:] for i in l]

    def rerooted(self, root):
        return RootedTree(self.K, self.edges, root)


def build_rooted_tree(K, edges, root):
    return RootedTree(K, edges, root)


def line_tree(K):
    """Line graph ``1 - 2 - ... - K`` rooted at ``K``."""
    return RootedTree(K, [(i, i + 1) for i in range(1, K)], K)


def hss_binary_tree(num_leaves):
    """
    Post-ordered full binary tree with ``num_leaves`` leaves.

    The leaves are split as evenly as possible at every internal node, with
    the left subtree taking the larger half. Nodes are numbered in
    post-order, so the root is the last node.

    Returns
    -------
    tree : RootedTree
    empty_nodes : tuple of int
        The internal nodes, which carry zero input/output dimensions in the
        HSS setting.
    """
    if num_leaves < 2:
        raise BadLeafCount(f"need at least 2 leaves, got {num_leaves}")
    edges = []
    internal = []
    counter = [0]

    def build(n):
        if n == 1:
            counter[0] += 1
            return counter[0]
        left = build((n + 1) // 2)
        right = build(n // 2)
        counter[0] += 1
        node = counter[0]
        edges.extend([(left, node), (right, node)])
        internal.append(node)
        return node

    root = build(num_leaves)
    return RootedTree(counter[0], edges, root), tuple(sorted(internal))


def random_tree(K, rng, root=None):
    """Random labelled tree: node ``k`` attaches to a uniform earlier node, then labels are shuffled."""
    perm = rng.permutation(K) + 1
    edges = [(int(perm[k]), int(perm[rng.integers(0, k)])) for k in range(1, K)]
    if root is None:
        root = int(rng.integers(1, K + 1))
    return RootedTree(K, edges, root)
