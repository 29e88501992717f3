"""Tests for the objective, the per-row ridge solves and ALS."""

import time

import numpy as np
import pytest

from conftest import random_sparse_matrix
from core.errors import DimensionMismatch, SingularSystem
from core.ratings import Observation, RatingMatrix
from core.settings import FitConfig, HalfStep, Regularization
from factorization.als import als_fit
from factorization.linalg import ellipsoid_widths, solve_spd, solve_spd_stack
from factorization.solvers import (
    objective,
    solve_item_row,
    solve_items,
    solve_user_row,
    solve_users,
    user_design_matrix,
)


def dense_ridge(fixed_rows: np.ndarray, ratings: np.ndarray, lam: float, weight: float) -> np.ndarray:
    """Independent normal-equations solve of the same ridge problem."""
    k = fixed_rows.shape[1]
    gram = np.zeros((k, k))
    rhs = np.zeros(k)
    for row, r in zip(fixed_rows, ratings):
        gram += np.outer(row, row)
        rhs += r * row
    return np.linalg.solve(gram + lam * weight * np.eye(k), rhs)


def single_rating(i: int, j: int, rating: float, n_users: int = 1, n_items: int = 1) -> RatingMatrix:
    return RatingMatrix.from_observations(n_users, n_items, [Observation(i, j, rating)])


class TestObjective:

    def test_zero_factors_sum_of_squares(self, example_matrix):
        U = np.zeros((4, 3))
        V = np.zeros((8, 3))
        for lam in (0.0, 0.05, 1.0):
            assert objective(U, V, example_matrix, FitConfig(rank=3, lam=lam)) == pytest.approx(84.0)

    def test_empty_matrix(self):
        m = RatingMatrix(3, 4)
        cfg = FitConfig(rank=2, lam=0.0)
        assert objective(np.ones((3, 2)), np.ones((4, 2)), m, cfg) == 0.0

    def test_exact_rank_one_fit(self, example_matrix):
        u = np.arange(1.0, 5.0)[:, None]
        v = np.linspace(0.5, 2.0, 8)[:, None]
        full = u @ v.T
        m = RatingMatrix.from_observations(
            4, 8, (Observation(o.user, o.item, full[o.user, o.item]) for o in example_matrix.observations())
        )
        assert objective(u, v, m, FitConfig(rank=1, lam=0.0)) == pytest.approx(0.0, abs=1e-12)

    def test_standard_vs_weighted_penalty(self, example_matrix):
        U = np.ones((4, 1))
        V = np.ones((8, 1))
        standard = objective(U, V, example_matrix, FitConfig(rank=1, lam=1.0, regularization="standard"))
        weighted = objective(U, V, example_matrix, FitConfig(rank=1, lam=1.0, regularization="weighted"))
        loss = objective(U, V, example_matrix, FitConfig(rank=1, lam=0.0))
        assert standard == pytest.approx(loss + 12.0)
        assert weighted == pytest.approx(loss + 18.0)

    def test_dimension_mismatch(self, example_matrix):
        with pytest.raises(DimensionMismatch):
            objective(np.zeros((3, 2)), np.zeros((8, 2)), example_matrix, FitConfig(rank=2))


class TestRowSolves:

    def test_one_point_least_squares(self):
        m = single_rating(0, 0, 2.0)
        u, a = solve_user_row(0, np.array([[1.0]]), m, FitConfig(rank=1, lam=0.0))
        assert u == pytest.approx([2.0])
        assert a == pytest.approx(np.array([[1.0]]))

    def test_scalar_ridge(self):
        m = single_rating(0, 0, 2.0)
        u, a = solve_user_row(0, np.array([[1.0]]), m, FitConfig(rank=1, lam=0.5))
        assert u == pytest.approx([4.0 / 3.0])
        assert a == pytest.approx(np.array([[1.5]]))

    def test_item_mirror(self):
        m = single_rating(0, 0, 5.0)
        v, b = solve_item_row(0, np.array([[1.0]]), m, FitConfig(rank=1, lam=0.0))
        assert v == pytest.approx([5.0])
        assert b == pytest.approx(np.array([[1.0]]))

    def test_cold_rows(self):
        m = RatingMatrix(2, 2)
        cfg = FitConfig(rank=3, lam=0.2)
        u, a = solve_user_row(0, np.ones((2, 3)), m, cfg)
        v, b = solve_item_row(1, np.ones((2, 3)), m, cfg)
        assert np.all(u == 0) and np.all(v == 0)
        assert a == pytest.approx(0.2 * np.eye(3))
        assert b == pytest.approx(0.2 * np.eye(3))

    def test_singular_with_zero_lambda(self):
        m = single_rating(0, 0, 2.0, n_items=2)
        with pytest.raises(SingularSystem):
            solve_user_row(0, np.array([[1.0, 0.0], [0.0, 1.0]]), m, FitConfig(rank=2, lam=0.0))

    def test_ridge_oracle_equivalence(self):
        """Closed-form rows match an independent dense solve on 100 random instances."""
        rng = np.random.default_rng(7)
        start = time.perf_counter()
        for trial in range(100):
            k = int(rng.integers(1, 9))
            lam = float(rng.choice([0.0, 0.05, 0.2, 1.0]))
            reg = Regularization.WEIGHTED if trial % 2 else Regularization.STANDARD
            # lambda = 0 needs enough ratings for a full-rank Gram matrix
            low = k + 2 if lam == 0.0 else 1
            count = int(rng.integers(low, max(low, 30) + 1))
            n_items = count + 5
            items = rng.choice(n_items, size=count, replace=False)
            ratings = rng.uniform(1, 5, size=count)
            m = RatingMatrix.from_observations(
                2, n_items, (Observation(0, int(j), float(r)) for j, r in zip(items, ratings))
            )
            V = rng.normal(size=(n_items, k))
            cfg = FitConfig(rank=k, lam=lam, regularization=reg)
            weight = count if reg == Regularization.WEIGHTED else 1.0

            u, a = solve_user_row(0, V, m, cfg)
            order = np.argsort(items)
            expected = dense_ridge(V[items[order]], ratings[order], lam, weight)
            assert np.max(np.abs(u - expected)) < 1e-8
            assert np.allclose(a, a.T)

            mt = RatingMatrix.from_observations(
                n_items, 2, (Observation(int(j), 0, float(r)) for j, r in zip(items, ratings))
            )
            v, b = solve_item_row(0, V, mt, cfg)
            assert np.max(np.abs(v - expected)) < 1e-8
        assert time.perf_counter() - start < 5.0

    def test_batched_solves_match_row_solves(self):
        rng = np.random.default_rng(3)
        m = random_sparse_matrix(rng, 30, 20, 0.2)
        cfg = FitConfig(rank=4, lam=0.1)
        V = rng.normal(size=(20, 4))
        U = rng.normal(size=(30, 4))
        batched_u = solve_users(V, m, cfg)
        batched_v = solve_items(U, m, cfg)
        for i in range(30):
            assert batched_u[i] == pytest.approx(solve_user_row(i, V, m, cfg)[0], abs=1e-10)
        for j in range(20):
            assert batched_v[j] == pytest.approx(solve_item_row(j, U, m, cfg)[0], abs=1e-10)

    def test_standard_equals_weighted_with_single_ratings(self):
        m = RatingMatrix.from_observations(3, 3, [Observation(i, i, float(i + 1)) for i in range(3)])
        V = np.random.default_rng(0).normal(size=(3, 2))
        for i in range(3):
            ws, _ = solve_user_row(i, V, m, FitConfig(rank=2, lam=0.3, regularization="weighted"))
            ss, _ = solve_user_row(i, V, m, FitConfig(rank=2, lam=0.3, regularization="standard"))
            assert ws == pytest.approx(ss)

    def test_stationarity(self):
        """The gradient of the objective in U_i vanishes at the closed-form row."""
        rng = np.random.default_rng(11)
        m = random_sparse_matrix(rng, 10, 12, 0.4)
        cfg = FitConfig(rank=3, lam=0.1)
        V = rng.normal(size=(12, 3))
        U = solve_users(V, m, cfg)
        for i in range(10):
            idx, r = m.row_ratings(i)
            if idx.size == 0:
                continue
            grad = -2 * V[idx].T @ (r - V[idx] @ U[i]) + 2 * cfg.lam * idx.size * U[i]
            assert np.max(np.abs(grad)) < 1e-8


class TestLinalg:

    def test_solve_spd(self):
        a = np.array([[4.0, 1.0], [1.0, 3.0]])
        b = np.array([1.0, 2.0])
        assert solve_spd(a, b) == pytest.approx(np.linalg.solve(a, b))

    def test_solve_spd_rank_deficient(self):
        with pytest.raises(SingularSystem):
            solve_spd(np.array([[1.0, 1.0], [1.0, 1.0]]), np.array([1.0, 1.0]))

    def test_solve_spd_stack(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(6, 3, 3))
        a = x @ np.swapaxes(x, 1, 2) + np.eye(3)
        b = rng.normal(size=(6, 3))
        solved = solve_spd_stack(a, b)
        for s in range(6):
            assert solved[s] == pytest.approx(np.linalg.solve(a[s], b[s]))

    def test_ellipsoid_shrinkage(self):
        """Adding an observation never widens the user ellipsoid along any direction."""
        rng = np.random.default_rng(5)
        for _ in range(50):
            k = int(rng.integers(1, 6))
            n_items = 12
            V = rng.normal(size=(n_items, k))
            lam = float(rng.choice([0.05, 0.2, 1.0]))
            m = RatingMatrix(1, n_items)
            rated = rng.choice(n_items, size=int(rng.integers(0, 6)), replace=False)
            for j in rated:
                m.insert_observation(Observation(0, int(j), 3.0))
            directions = rng.normal(size=(10, k))
            before = ellipsoid_widths(user_design_matrix(0, V, m, lam), directions)
            new_item = int(rng.choice(np.setdiff1d(np.arange(n_items), rated)))
            m.insert_observation(Observation(0, new_item, 2.0))
            after = ellipsoid_widths(user_design_matrix(0, V, m, lam), directions)
            assert np.all(after <= before + 1e-10)


class TestAls:

    def test_objective_non_increasing(self):
        """zeta never increases across half-sweeps on random sparse matrices."""
        rng = np.random.default_rng(0)
        start = time.perf_counter()
        for trial in range(20):
            m = random_sparse_matrix(rng, 200, 100, 0.1)
            reg = "weighted" if trial % 2 == 0 else "standard"
            finish = HalfStep.USERS if trial % 3 else HalfStep.ITEMS
            cfg = FitConfig(rank=5, lam=0.05, regularization=reg, seed=trial, max_sweeps=10,
                            objective_tolerance=0.0)
            trace = als_fit(m, cfg, finish=finish).objective_trace
            for prev, cur in zip(trace, trace[1:]):
                assert cur <= prev + 1e-9 * (1 + prev)
        assert time.perf_counter() - start < 60.0

    def test_exact_recovery(self):
        rng = np.random.default_rng(1)
        full = rng.normal(size=(20, 2)) @ rng.normal(size=(2, 15))
        m = RatingMatrix.from_observations(
            20, 15, (Observation(i, j, full[i, j]) for i in range(20) for j in range(15))
        )
        cfg = FitConfig(rank=2, lam=1e-6, max_sweeps=500, objective_tolerance=1e-14, seed=3)
        start = time.perf_counter()
        model = als_fit(m, cfg)
        assert time.perf_counter() - start < 1.0
        assert model.rmse(full) < 1e-3

    @pytest.mark.parametrize("regularization", [Regularization.WEIGHTED, Regularization.STANDARD])
    @pytest.mark.parametrize("finish", [HalfStep.USERS, HalfStep.ITEMS])
    def test_returned_factors_are_stationary(self, regularization, finish):
        """Central differences of the objective vanish along the side solved last."""
        rng = np.random.default_rng(21)
        m = random_sparse_matrix(rng, 12, 10, 0.4)
        cfg = FitConfig(rank=3, lam=0.1, regularization=regularization, max_sweeps=10)
        model = als_fit(m, cfg, finish=finish)
        U, V = model.user_factors, model.item_factors
        zeta = objective(U, V, m, cfg)
        h = 1e-5

        solved = U if finish == HalfStep.USERS else V
        for row in range(solved.shape[0]):
            for c in range(cfg.rank):
                up, down = solved.copy(), solved.copy()
                up[row, c] += h
                down[row, c] -= h
                if finish == HalfStep.USERS:
                    diff = objective(up, V, m, cfg) - objective(down, V, m, cfg)
                else:
                    diff = objective(U, up, m, cfg) - objective(U, down, m, cfg)
                assert abs(diff / (2 * h)) <= 1e-4 * (1.0 + zeta)

    def test_warm_start_fixed_point(self):
        rng = np.random.default_rng(4)
        m = random_sparse_matrix(rng, 40, 30, 0.3)
        cfg = FitConfig(rank=3, lam=0.1, max_sweeps=300, objective_tolerance=1e-12)
        model = als_fit(m, cfg)
        refit = als_fit(m, cfg, warm_start=model, max_sweeps=1)
        assert refit.last_objective == pytest.approx(model.last_objective, rel=1e-6)

    def test_deterministic(self, example_matrix):
        cfg = FitConfig(rank=2, lam=0.1, seed=9)
        a = als_fit(example_matrix, cfg)
        b = als_fit(example_matrix, cfg)
        assert np.array_equal(a.user_factors, b.user_factors)
        assert np.array_equal(a.item_factors, b.item_factors)

    def test_finish_side(self, example_matrix):
        cfg = FitConfig(rank=2, lam=0.1, max_sweeps=3, objective_tolerance=0.0)
        users_last = als_fit(example_matrix, cfg, finish=HalfStep.USERS)
        items_last = als_fit(example_matrix, cfg, finish=HalfStep.ITEMS)
        assert users_last.finish == HalfStep.USERS
        assert items_last.finish == HalfStep.ITEMS
        # The side solved last is the exact ridge solution for the other side
        assert users_last.user_factors == pytest.approx(
            solve_users(users_last.item_factors, example_matrix, cfg))
        assert items_last.item_factors == pytest.approx(
            solve_items(items_last.user_factors, example_matrix, cfg))

    def test_cold_rows_are_zero(self, example_matrix):
        model = als_fit(example_matrix, FitConfig(rank=2, lam=0.1))
        # items 4 and 7 have no ratings
        assert np.all(model.item_factors[[4, 7]] == 0)

    def test_empty_matrix(self):
        model = als_fit(RatingMatrix(3, 4), FitConfig(rank=2))
        assert np.all(model.user_factors == 0)
        assert model.predict(0).tolist() == [0.0] * 4

    def test_warm_start_grows_with_matrix(self, example_matrix):
        cfg = FitConfig(rank=2, lam=0.1)
        model = als_fit(example_matrix, cfg)
        m = example_matrix.copy()
        i = m.add_user()
        m.add_item()
        m.insert_observation(Observation(i, 0, 4.0))
        refit = als_fit(m, cfg, warm_start=model, max_sweeps=2)
        assert refit.user_factors.shape == (5, 2)
        assert refit.item_factors.shape == (9, 2)

    def test_warm_start_rank_mismatch(self, example_matrix):
        model = als_fit(example_matrix, FitConfig(rank=2))
        with pytest.raises(DimensionMismatch):
            als_fit(example_matrix, FitConfig(rank=3), warm_start=model)
