"""Graph kernel selection: compiled Cython core when available, pure-Python
twin otherwise.  Set EQUILIBRA_PURE_KERNELS=1 to force the fallback."""

import os

from . import pure

if os.environ.get("EQUILIBRA_PURE_KERNELS"):
    _impl = pure
else:
    try:
        from . import _speedups as _impl
    except ImportError:
        _impl = pure

IMPL = _impl.IMPL
reachable = _impl.reachable
attractor = _impl.attractor
scc = _impl.scc


def csr(n, edges):
    """Build (off, dst) CSR adjacency from an int edge list."""
    count = [0] * (n + 1)
    for u, _ in edges:
        count[u + 1] += 1
    for i in range(n):
        count[i + 1] += count[i]
    off = list(count)
    dst = [0] * len(edges)
    fill = list(off)
    for u, v in edges:
        dst[fill[u]] = v
        fill[u] += 1
    return off, dst


def csr_pred(n, edges):
    """Predecessor CSR (poff, psrc)."""
    return csr(n, [(v, u) for u, v in edges])
