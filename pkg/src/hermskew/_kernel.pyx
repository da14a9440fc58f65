# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Bron-Kerbosch kernel over dense uint64 bitset rows."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef class _Search:
    cdef object adj_ref
    cdef const uint64_t* adj
    cdef int n
    cdef int W
    cdef uint64_t* buf
    cdef int* R
    cdef int64_t[::1] hist
    cdef unsigned char[::1] emit
    cdef object sink
    cdef bint has_sink
    cdef bint pivot
    cdef bint stopped
    cdef long long nodes
    cdef long long max_nodes

    def __cinit__(self, adj, bint pivot, sink, emit, long long max_nodes):
        cdef const uint64_t[:, ::1] view = adj
        self.adj_ref = adj
        self.n = view.shape[0]
        self.W = view.shape[1]
        self.adj = &view[0, 0] if self.n > 0 else NULL
        self.buf = <uint64_t*> malloc((self.n + 2) * 3 * self.W * sizeof(uint64_t))
        self.R = <int*> malloc((self.n + 1) * sizeof(int))
        if self.buf == NULL or self.R == NULL:
            raise MemoryError()
        self.hist = np.zeros(self.n + 1, dtype=np.int64)
        self.emit = np.ascontiguousarray(emit, dtype=np.uint8)
        self.sink = sink
        self.has_sink = sink is not None
        self.pivot = pivot
        self.stopped = False
        self.nodes = 0
        self.max_nodes = max_nodes

    def __dealloc__(self):
        free(self.buf)
        free(self.R)

    cdef int report(self, int rlen) except -1:
        self.hist[rlen] += 1
        if self.has_sink and self.emit[rlen]:
            self.sink(tuple(sorted([self.R[i] for i in range(rlen)])))
        return 0

    cdef int expand(self, int depth, int rlen) except -1:
        cdef int W = self.W
        cdef uint64_t* P = self.buf + <size_t> depth * 3 * W
        cdef uint64_t* E = P + W
        cdef uint64_t* C = E + W
        cdef uint64_t* cP = P + 3 * W
        cdef uint64_t* cE = cP + W
        cdef const uint64_t* row
        cdef int w, k, b, u, v, best, score, best_score
        cdef uint64_t anyP = 0, anyE = 0, x, bit

        self.nodes += 1
        if self.max_nodes > 0 and self.nodes > self.max_nodes:
            self.stopped = True
            return 0
        for w in range(W):
            anyP |= P[w]
            anyE |= E[w]
        if anyP == 0:
            if anyE == 0:
                self.report(rlen)
            return 0

        if self.pivot:
            best = -1
            best_score = -1
            for w in range(W):
                x = P[w] | E[w]
                while x:
                    b = __builtin_ctzll(x)
                    x &= x - 1
                    u = w * 64 + b
                    row = self.adj + <size_t> u * W
                    score = 0
                    for k in range(W):
                        score += __builtin_popcountll(P[k] & row[k])
                    if score > best_score:
                        best_score = score
                        best = u
            row = self.adj + <size_t> best * W
            for w in range(W):
                C[w] = P[w] & ~row[w]
        else:
            for w in range(W):
                C[w] = P[w]

        for w in range(W):
            x = C[w]
            while x:
                b = __builtin_ctzll(x)
                x &= x - 1
                v = w * 64 + b
                row = self.adj + <size_t> v * W
                for k in range(W):
                    cP[k] = P[k] & row[k]
                    cE[k] = E[k] & row[k]
                self.R[rlen] = v
                self.expand(depth + 1, rlen + 1)
                if self.stopped:
                    return 0
                bit = (<uint64_t> 1) << b
                P[w] &= ~bit
                E[w] |= bit
        return 0


def run(adj, R, P, E, bint pivot, sink=None, emit=None, long long max_nodes=0):
    """Enumerate maximal cliques containing R inside R + P, excluding those extendable by E.

    Returns ``(hist, nodes, completed)`` where ``hist[k]`` counts reported
    cliques of size k.  ``sink`` receives each sorted clique whose size is
    flagged in ``emit`` (all sizes when ``emit`` is None).
    """
    adj = np.ascontiguousarray(adj, dtype=np.uint64)
    cdef int n = adj.shape[0]
    if emit is None:
        emit = np.ones(n + 1, dtype=np.uint8)
    cdef _Search s = _Search(adj, pivot, sink, emit, max_nodes)
    cdef int W = s.W
    cdef const uint64_t[::1] pv = np.ascontiguousarray(P, dtype=np.uint64)
    cdef const uint64_t[::1] ev = np.ascontiguousarray(E, dtype=np.uint64)
    cdef int i
    for i in range(W):
        s.buf[i] = pv[i]
        s.buf[W + i] = ev[i]
    R = list(R)
    for i in range(len(R)):
        s.R[i] = R[i]
    s.expand(0, len(R))
    return np.asarray(s.hist), s.nodes, not s.stopped
