"""Pure-Python expansion kernel for the derivation search engine.

Forms are tuples of ints: a terminal item is -(terminal_id + 1); a variable
occurrence is stack_id * nv + var_id where stack_id interns an index stack in
the cons pool (pool_top / pool_rest / pool_depth, entry 0 = empty stack).

igkit._speedups is a Cython twin of this module; both must produce identical
successor lists in identical order.
"""

IMPLEMENTATION = "pure"


def expand(form, by_var, prods, nv,
           pool_top, pool_rest, pool_depth, intern,
           max_width, max_stack, max_terms, drop_terminals):
    """All one-step successors of an encoded form, position-major.

    prods[pid] = (kind, lhs_index_id, rhs, push_var, push_index, rhs_nvars,
    rhs_nterms) with kind 0=plain, 1=push, 2=consume; rhs items use the same
    encoding as forms except that variable entries hold the bare var id.
    Caps are -1 when absent; successors violating a cap are dropped.
    `drop_terminals` keeps successor forms terminal-free (skeleton search).
    """
    width = 0
    for it in form:
        if it >= 0:
            width += 1
    nterms = len(form) - width
    out = []
    for i, item in enumerate(form):
        if item < 0:
            continue
        vid = item % nv
        sid = item // nv
        head = form[:i]
        tail = form[i + 1:]
        for pid in by_var[vid]:
            kind, lhs_idx, rhs, push_var, push_idx, rhs_nvars, rhs_nterms = prods[pid]
            if kind == 1:
                if max_stack >= 0 and pool_depth[sid] + 1 > max_stack:
                    continue
                key = (push_idx, sid)
                s2 = intern.get(key)
                if s2 is None:
                    s2 = len(pool_top)
                    pool_top.append(push_idx)
                    pool_rest.append(sid)
                    pool_depth.append(pool_depth[sid] + 1)
                    intern[key] = s2
                out.append((i, pid, head + (s2 * nv + push_var,) + tail))
                continue
            if kind == 2:
                if sid == 0 or pool_top[sid] != lhs_idx:
                    continue
                s2 = pool_rest[sid]
            else:
                s2 = sid
            if max_width >= 0 and width - 1 + rhs_nvars > max_width:
                continue
            if max_terms >= 0 and nterms + rhs_nterms > max_terms:
                continue
            if drop_terminals:
                mid = tuple(s2 * nv + c for c in rhs if c >= 0)
            else:
                mid = tuple(c if c < 0 else s2 * nv + c for c in rhs)
            out.append((i, pid, head + mid + tail))
    return out
