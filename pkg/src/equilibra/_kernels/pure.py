"""Pure-Python graph kernels.

Semantics twin of the compiled `_speedups` module; graphs are CSR arrays
over int vertex ids.  Every function here must stay bit-identical to its
compiled counterpart (the test suite runs both).
"""

IMPL = "pure"


def reachable(n, off, dst, sources):
    """Forward reachability; `sources` is a 0/1 list, returns a 0/1 list."""
    seen = list(sources)
    stack = [v for v in range(n) if sources[v]]
    while stack:
        u = stack.pop()
        for k in range(off[u], off[u + 1]):
            w = dst[k]
            if not seen[w]:
                seen[w] = 1
                stack.append(w)
    return seen


def attractor(n, off, dst, poff, psrc, coalition, target):
    """Classical attractor.

    Least set A containing `target`, closed under: coalition vertex with an
    edge into A; non-coalition vertex with at least one edge, all of them
    into A.  Deadend non-targets are never absorbed.
    """
    inset = list(target)
    count = [off[v + 1] - off[v] for v in range(n)]
    stack = [v for v in range(n) if target[v]]
    while stack:
        w = stack.pop()
        for k in range(poff[w], poff[w + 1]):
            u = psrc[k]
            if inset[u]:
                continue
            if coalition[u]:
                inset[u] = 1
                stack.append(u)
            else:
                count[u] -= 1
                if count[u] == 0 and off[u + 1] - off[u] > 0:
                    inset[u] = 1
                    stack.append(u)
    return inset


def scc(n, off, dst):
    """Tarjan SCC, iterative.  Returns (component id per vertex, count);
    ids are assigned in reverse topological order of discovery."""
    index = [-1] * n
    low = [0] * n
    on_stack = [0] * n
    comp = [-1] * n
    stack = []
    ncomp = 0
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, off[root])]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = 1
        while work:
            v, ptr = work[-1]
            if ptr < off[v + 1]:
                work[-1] = (v, ptr + 1)
                w = dst[ptr]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = 1
                    work.append((w, off[w]))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            else:
                work.pop()
                if work:
                    pv = work[-1][0]
                    if low[v] < low[pv]:
                        low[pv] = low[v]
                if low[v] == index[v]:
                    while True:
                        w = stack.pop()
                        on_stack[w] = 0
                        comp[w] = ncomp
                        if w == v:
                            break
                    ncomp += 1
    return comp, ncomp
