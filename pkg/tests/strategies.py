from hypothesis import strategies as st

from hyperstar import new_hypergraph


@st.composite
def hypergraphs(draw, max_n=64):
    k = draw(st.integers(2, 5))
    n = draw(st.integers(k, max_n))
    # few edges on a small vertex window makes shared stars likely
    window = draw(st.integers(k, n))
    edges = draw(st.lists(st.sets(st.integers(0, window - 1), min_size=k, max_size=k),
                          max_size=12, unique_by=lambda e: tuple(sorted(e))))
    return new_hypergraph(n, k, [sorted(e) for e in edges])
