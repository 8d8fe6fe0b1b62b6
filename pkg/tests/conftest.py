import hypothesis.strategies as st
from hypothesis import settings

from gcdsums import IndexSet, MultiIndex

settings.register_profile("suite", deadline=None, max_examples=100)
settings.load_profile("suite")


def multi_indices(max_index: int = 8, max_exponent: int = 3):
    return st.dictionaries(
        st.integers(1, max_index), st.integers(1, max_exponent), max_size=max_index
    ).map(MultiIndex)


def square_free_indices(max_index: int = 8):
    return multi_indices(max_index=max_index, max_exponent=1)


def index_sets(max_index: int = 8, max_exponent: int = 3, max_n: int = 10):
    return st.lists(
        multi_indices(max_index, max_exponent), min_size=1, max_size=max_n, unique=True
    ).map(IndexSet)


def square_free_sets(max_index: int = 8, max_n: int = 10):
    return index_sets(max_index=max_index, max_exponent=1, max_n=max_n)
