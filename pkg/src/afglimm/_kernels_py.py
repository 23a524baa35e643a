"""Pure-Python closure kernels over CSR adjacency.

Vertices are numbered row-major; ``ptr``/``idx`` is a CSR adjacency
(children or parents). Vertex sets are ``bytearray`` masks of length n.
The compiled twin in ``_kernels.pyx`` has the same signatures.
"""


def reach(ptr, idx, seed):
    """Reflexive-transitive closure of ``seed`` along the adjacency."""
    out = bytearray(seed)
    stack = [v for v in range(len(out)) if out[v]]
    while stack:
        v = stack.pop()
        for e in range(ptr[v], ptr[v + 1]):
            w = idx[e]
            if not out[w]:
                out[w] = 1
                stack.append(w)
    return out


def greatest_fixpoint(child_ptr, child_idx, parent_ptr, parent_idx, excluded):
    """Largest descendant-closed set disjoint from ``excluded``.

    Starts from the complement of ``excluded`` and removes any vertex with
    a child outside the current set until nothing changes.
    """
    n = len(excluded)
    member = bytearray(n)
    for v in range(n):
        member[v] = 0 if excluded[v] else 1
    stack = [v for v in range(n) if not member[v]]
    while stack:
        v = stack.pop()
        for e in range(parent_ptr[v], parent_ptr[v + 1]):
            u = parent_idx[e]
            if member[u]:
                member[u] = 0
                stack.append(u)
    return member


def saturate(child_ptr, child_idx, members, final_start):
    """Close ``members`` under saturation (all children in => vertex in).

    Vertices ``>= final_start`` sit on the last row and are left alone.
    Rows are processed bottom-up, so one pass suffices.
    """
    out = bytearray(members)
    for v in range(final_start - 1, -1, -1):
        if out[v]:
            continue
        lo, hi = child_ptr[v], child_ptr[v + 1]
        if lo == hi:
            continue
        for e in range(lo, hi):
            if not out[child_idx[e]]:
                break
        else:
            out[v] = 1
    return out


def ideal_violation(child_ptr, child_idx, members, final_start):
    """First axiom violation as ``(vertex, code)``; ``(-1, 0)`` if none.

    code 1: a member has a child outside; code 2: a non-member has all of
    its children inside.
    """
    for v in range(final_start):
        lo, hi = child_ptr[v], child_ptr[v + 1]
        if members[v]:
            for e in range(lo, hi):
                if not members[child_idx[e]]:
                    return v, 1
        elif lo < hi:
            for e in range(lo, hi):
                if not members[child_idx[e]]:
                    break
            else:
                return v, 2
    return -1, 0
