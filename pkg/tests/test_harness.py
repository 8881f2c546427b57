import numpy as np
import pytest

from frec.core import InvalidArgumentError
from frec.harness import (
    McConfig,
    cell_id,
    format_table,
    replicates_csv,
    run_power_sweep,
    run_record_law,
    run_size_power,
    with_workers,
)
from frec.simulate import ModelKind, NoiseSpec

SMALL = McConfig(model="m1", n_values=(30, 40), replicates=6, grid_points=10)


def test_rate_is_mean_of_indicators():
    res = run_size_power(SMALL)
    for c in res.cells:
        assert c.rejection_rate == c.rejects.sum() / 6
        assert c.T_samples.shape == (6,)
        np.testing.assert_array_equal(c.N_samples, c.N_upper + c.N_lower)
        np.testing.assert_allclose(c.T_samples, c.N_samples / np.sqrt(c.n))


def test_single_replicate_rate_is_binary():
    res = run_size_power(McConfig(model="m3", n_values=(20,), replicates=1, grid_points=5))
    assert res.cells[0].rejection_rate in (0.0, 1.0)


def test_determinism_across_workers():
    one = run_size_power(with_workers(SMALL, 1))
    two = run_size_power(with_workers(SMALL, 2))
    for a, b in zip(one.cells, two.cells):
        np.testing.assert_array_equal(a.T_samples, b.T_samples)
        np.testing.assert_array_equal(a.rejects, b.rejects)


def test_adding_cells_keeps_draws():
    alone = run_size_power(McConfig(model="m1", n_values=(40,), replicates=6, grid_points=10))
    both = run_size_power(SMALL)
    np.testing.assert_array_equal(alone.cell(40).T_samples, both.cell(40).T_samples)


def test_cell_id_is_stable():
    a = cell_id(ModelKind.M1, NoiseSpec(), 200, 0.5, 0.7)
    assert a == cell_id(ModelKind.M1, NoiseSpec(), 200, 0.5, 0.7)
    assert a != cell_id(ModelKind.M1, NoiseSpec(), 300, 0.5, 0.7)
    assert 0 <= a < 2**63


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        McConfig(replicates=0)
    with pytest.raises(InvalidArgumentError):
        McConfig(n_values=(2,))
    with pytest.raises(InvalidArgumentError):
        McConfig(alpha=1.0)
    with pytest.raises(InvalidArgumentError):
        McConfig(sweep=(0.5, 1.2))


def test_power_sweep_shape():
    cfg = McConfig(model="m4", n_values=(30,), replicates=3, grid_points=8, sweep=(0.6,))
    rows = run_power_sweep(cfg)
    assert len(rows) == 1 and rows[0][0] == 0.6
    with pytest.raises(InvalidArgumentError):
        run_power_sweep(McConfig(model="m3", sweep=(0.5,)))
    with pytest.raises(InvalidArgumentError):
        run_power_sweep(McConfig(model="m4"))


def test_record_law_outputs():
    r1 = run_record_law(McConfig(model="m1", n_values=(50,), replicates=20, grid_points=8))
    assert r1.samples.shape == (20,) and 0 <= r1.ks_statistic <= 1
    assert sum(c for _, c in r1.histogram(10)) == 20
    r3 = run_record_law(McConfig(model="m3", n_values=(50,), replicates=5, grid_points=8))
    assert r3.trajectories.shape == (5, 50)
    np.testing.assert_allclose(r3.reference, np.log(np.arange(1, 51)))
    with pytest.raises(InvalidArgumentError):
        run_record_law(McConfig(model="m4"))


def test_table_and_csv():
    res = run_size_power(SMALL)
    table = format_table(res, "Size")
    assert "Size" in table and "(n/a)" in table and "Bm" in table
    rows = replicates_csv(res).strip().splitlines()
    assert len(rows) == 1 + 12
    assert rows[0].startswith("model,noise,n")
