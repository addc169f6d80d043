from ultrawave.trees import BallTree


def random_measured_tree(rng, max_depth=4, max_branching=4, grow_prob=0.6) -> BallTree:
    """Random tree with depth <= max_depth, branching 2..max_branching,
    positive random leaf measures, interior measures forced by additivity."""
    parent: list[int | None] = [None]
    level = [0]
    frontier = [0]
    for depth in range(1, max_depth + 1):
        new = []
        for node in frontier:
            if depth == 1 or rng.random() < grow_prob:
                k = int(rng.integers(2, max_branching + 1))
                for _ in range(k):
                    parent.append(node)
                    level.append(depth)
                    new.append(len(parent) - 1)
        frontier = new
    n = len(parent)
    children: list[list[int]] = [[] for _ in range(n)]
    for i, p in enumerate(parent):
        if p is not None:
            children[p].append(i)
    diameter = [0.0] * n
    diameter[0] = 1.0
    for i in range(1, n):
        diameter[i] = diameter[parent[i]] * float(rng.uniform(0.3, 0.7))
    measure = [0.0] * n
    for i in sorted(range(n), key=lambda v: -level[v]):
        if children[i]:
            measure[i] = float(sum(measure[c] for c in children[i]))
        else:
            measure[i] = float(rng.uniform(0.1, 2.0))
    return BallTree(parent, measure, diameter)


def random_table_symbol(rng, tree: BallTree, real=False):
    from ultrawave.operators import TableSymbol

    entries = {}
    for b in tree.non_leaf_balls():
        if real:
            entries[b] = complex(rng.standard_normal())
        else:
            entries[b] = complex(rng.standard_normal(), rng.standard_normal())
    return TableSymbol(entries)


def random_leaf_function(rng, tree: BallTree):
    from ultrawave.wavelets import TestFunction

    values = {
        x: complex(rng.standard_normal(), rng.standard_normal()) for x in tree.leaves
    }
    return TestFunction(tree, values)
