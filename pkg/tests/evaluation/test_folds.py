"""
Test trace-level stratified folds.
"""

import pytest

from driveby_sentinel.errors import ConfigError, InsufficientDataError
from driveby_sentinel.evaluation.folds import stratified_trace_folds

N_BENIGN = 87
N_MALICIOUS = 13
K = 10


@pytest.fixture
def traces():
    """Trace ids and labels, 13% malicious."""
    ids = [f"t{i:03d}" for i in range(N_BENIGN + N_MALICIOUS)]
    labels = [0] * N_BENIGN + [1] * N_MALICIOUS
    return ids, labels


def test_folds_partition_traces(traces):
    """Folds are disjoint and cover every trace."""
    ids, labels = traces
    folds = stratified_trace_folds(ids, labels, K, seed=1)
    assert len(folds) == K
    flat = [t for fold in folds for t in fold]
    assert sorted(flat) == ids
    assert len(set(flat)) == len(flat)


def test_folds_are_stratified(traces):
    """Each fold holds floor or ceil of n_c / k traces of each class."""
    ids, labels = traces
    truth = dict(zip(ids, labels))
    for fold in stratified_trace_folds(ids, labels, K, seed=1):
        malicious = sum(truth[t] for t in fold)
        benign = len(fold) - malicious
        assert malicious in (N_MALICIOUS // K, N_MALICIOUS // K + 1)
        assert benign in (N_BENIGN // K, N_BENIGN // K + 1)


def test_fold_sizes_balanced(traces):
    """Dealing continues across classes, so fold sizes differ by at most one."""
    ids, labels = traces
    sizes = [len(f) for f in stratified_trace_folds(ids, labels, K, seed=3)]
    assert max(sizes) - min(sizes) <= 1


def test_seeded(traces):
    """The same seed gives the same assignment; another seed does not."""
    ids, labels = traces
    first = stratified_trace_folds(ids, labels, K, seed=5)
    assert stratified_trace_folds(ids, labels, K, seed=5) == first
    assert stratified_trace_folds(ids, labels, K, seed=6) != first


def test_input_order_kept(traces):
    """Folds list their traces in input order."""
    ids, labels = traces
    for fold in stratified_trace_folds(ids, labels, K, seed=2):
        assert fold == sorted(fold)


def test_too_few_traces_in_a_class():
    """A class smaller than k is refused."""
    with pytest.raises(InsufficientDataError):
        stratified_trace_folds(["a", "b", "c"], [0, 0, 1], 2, seed=0)


@pytest.mark.parametrize(
    ("ids", "labels", "k"),
    [(["a", "b"], [0, 1], 1), (["a", "b"], [0], 2), (["a", "a", "b", "c"], [0, 0, 1, 1], 2)],
)
def test_invalid_arguments(ids, labels, k):
    """k below 2, length mismatches and duplicate ids are configuration errors."""
    with pytest.raises(ConfigError):
        stratified_trace_folds(ids, labels, k, seed=0)
