# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of pure.py; same functions, same results, C loops."""

from cpython.mem cimport PyMem_Malloc, PyMem_Free

IMPL = "compiled"


cdef int* _as_ints(object seq, Py_ssize_t n) except NULL:
    cdef int* buf = <int*> PyMem_Malloc(n * sizeof(int) if n else sizeof(int))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        buf[i] = seq[i]
    return buf


def reachable(int n, object off, object dst, object sources):
    cdef int* coff = _as_ints(off, n + 1)
    cdef int* cdst = _as_ints(dst, len(dst))
    cdef int* seen = _as_ints(sources, n)
    cdef int* stack = <int*> PyMem_Malloc((n if n else 1) * sizeof(int))
    cdef int top = 0, u, w
    cdef Py_ssize_t k
    try:
        if stack == NULL:
            raise MemoryError()
        for u in range(n):
            if seen[u]:
                stack[top] = u
                top += 1
        while top:
            top -= 1
            u = stack[top]
            for k in range(coff[u], coff[u + 1]):
                w = cdst[k]
                if not seen[w]:
                    seen[w] = 1
                    stack[top] = w
                    top += 1
        return [seen[u] for u in range(n)]
    finally:
        PyMem_Free(coff)
        PyMem_Free(cdst)
        PyMem_Free(seen)
        if stack != NULL:
            PyMem_Free(stack)


def attractor(int n, object off, object dst, object poff, object psrc,
              object coalition, object target):
    cdef int* coff = _as_ints(off, n + 1)
    cdef int* cpoff = _as_ints(poff, n + 1)
    cdef int* cpsrc = _as_ints(psrc, len(psrc))
    cdef int* coal = _as_ints(coalition, n)
    cdef int* inset = _as_ints(target, n)
    cdef int* count = <int*> PyMem_Malloc((n if n else 1) * sizeof(int))
    cdef int* stack = <int*> PyMem_Malloc((n if n else 1) * sizeof(int))
    cdef int top = 0, u, w
    cdef Py_ssize_t k
    try:
        if count == NULL or stack == NULL:
            raise MemoryError()
        for u in range(n):
            count[u] = coff[u + 1] - coff[u]
            if inset[u]:
                stack[top] = u
                top += 1
        while top:
            top -= 1
            w = stack[top]
            for k in range(cpoff[w], cpoff[w + 1]):
                u = cpsrc[k]
                if inset[u]:
                    continue
                if coal[u]:
                    inset[u] = 1
                    stack[top] = u
                    top += 1
                else:
                    count[u] -= 1
                    if count[u] == 0 and coff[u + 1] - coff[u] > 0:
                        inset[u] = 1
                        stack[top] = u
                        top += 1
        return [inset[u] for u in range(n)]
    finally:
        PyMem_Free(coff)
        PyMem_Free(cpoff)
        PyMem_Free(cpsrc)
        PyMem_Free(coal)
        PyMem_Free(inset)
        if count != NULL:
            PyMem_Free(count)
        if stack != NULL:
            PyMem_Free(stack)


def scc(int n, object off, object dst):
    cdef int* coff = _as_ints(off, n + 1)
    cdef int* cdst = _as_ints(dst, len(dst))
    cdef int* index = <int*> PyMem_Malloc((n if n else 1) * sizeof(int))
    cdef int* low = <int*> PyMem_Malloc((n if n else 1) * sizeof(int))
    cdef int* onstk = <int*> PyMem_Malloc((n if n else 1) * sizeof(int))
    cdef int* comp = <int*> PyMem_Malloc((n if n else 1) * sizeof(int))
    cdef int* stack = <int*> PyMem_Malloc((n if n else 1) * sizeof(int))
    cdef int* wv = <int*> PyMem_Malloc((n if n else 1) * sizeof(int))
    cdef int* wp = <int*> PyMem_Malloc((n if n else 1) * sizeof(int))
    cdef int sp = 0, wtop = 0, ncomp = 0, counter = 0
    cdef int root, v, w, ptr, pv
    try:
        if (index == NULL or low == NULL or onstk == NULL or comp == NULL
                or stack == NULL or wv == NULL or wp == NULL):
            raise MemoryError()
        for v in range(n):
            index[v] = -1
            onstk[v] = 0
            comp[v] = -1
        for root in range(n):
            if index[root] != -1:
                continue
            wv[0] = root
            wp[0] = coff[root]
            wtop = 1
            index[root] = counter
            low[root] = counter
            counter += 1
            stack[sp] = root
            sp += 1
            onstk[root] = 1
            while wtop:
                v = wv[wtop - 1]
                ptr = wp[wtop - 1]
                if ptr < coff[v + 1]:
                    wp[wtop - 1] = ptr + 1
                    w = cdst[ptr]
                    if index[w] == -1:
                        index[w] = counter
                        low[w] = counter
                        counter += 1
                        stack[sp] = w
                        sp += 1
                        onstk[w] = 1
                        wv[wtop] = w
                        wp[wtop] = coff[w]
                        wtop += 1
                    elif onstk[w] and index[w] < low[v]:
                        low[v] = index[w]
                else:
                    wtop -= 1
                    if wtop:
                        pv = wv[wtop - 1]
                        if low[v] < low[pv]:
                            low[pv] = low[v]
                    if low[v] == index[v]:
                        while True:
                            sp -= 1
                            w = stack[sp]
                            onstk[w] = 0
                            comp[w] = ncomp
                            if w == v:
                                break
                        ncomp += 1
        return [comp[v] for v in range(n)], ncomp
    finally:
        PyMem_Free(coff)
        PyMem_Free(cdst)
        for buf in ():
            pass
        if index != NULL: PyMem_Free(index)
        if low != NULL: PyMem_Free(low)
        if onstk != NULL: PyMem_Free(onstk)
        if comp != NULL: PyMem_Free(comp)
        if stack != NULL: PyMem_Free(stack)
        if wv != NULL: PyMem_Free(wv)
        if wp != NULL: PyMem_Free(wp)
