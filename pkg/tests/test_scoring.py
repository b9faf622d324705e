from __future__ import annotations


import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaintrust import scoring as sc
from chaintrust.errors import (
    EmptyAgreementSet,
    EmptyNeighbourSet,
    InsufficientRedundancy,
    InvalidAgreement,
    InvalidObservation,
    InvalidParams,
    RaggedMatrix,
    RatingOutOfRange,
    WeightsNotNormalized,
)

from oracles import oracle_commodity_trust_raw, oracle_decayed_sum, oracle_evidence

PARAMS = sc.TrmParams()


def obs(sensor_id, value, confidence=1.0, epoch=0, location_id="loc"):
    return sc.Observation(sensor_id, value, confidence, epoch, location_id)


def perfect_row(epoch=0, sensors=7, value=4.0, confidence=1.0):
    return [obs(f"s{i}", value, confidence, epoch) for i in range(sensors)]


def matrix_of(values2d, confs2d):
    rows = []
    for e, (vrow, crow) in enumerate(zip(values2d, confs2d)):
        rows.append(
            [obs(f"s{j}", v, c, e) for j, (v, c) in enumerate(zip(vrow, crow))]
        )
    return sc.ObservationMatrix(rows)


# --- parameter validation ---------------------------------------------------

def test_default_params_valid():
    p = sc.TrmParams()
    assert p.decay == 0.85
    assert p.min_sensors == 2


@pytest.mark.parametrize("decay", [0.0, -0.1, 1.0001])
def test_decay_out_of_range_rejected(decay):
    with pytest.raises(InvalidParams):
        sc.TrmParams(decay=decay)


def test_decay_of_one_allowed():
    assert sc.TrmParams(decay=1.0).decay == 1.0


def test_weights_must_sum_to_one():
    with pytest.raises(WeightsNotNormalized):
        sc.TrmParams(commodity_weight=0.5, behaviour_weight=0.5, endorsement_weight=0.5)


def test_inverted_range_weights_rejected():
    with pytest.raises(InvalidParams):
        sc.TrmParams(in_range_weight=0.0, out_of_range_weight=1.0)


def test_min_sensors_below_two_rejected():
    with pytest.raises(InvalidParams):
        sc.TrmParams(min_sensors=1)


# --- threshold weight ---------------------------------------------------------

def test_threshold_weight_in_range():
    assert sc.threshold_weight(4.0, PARAMS) == 1.0


def test_threshold_weight_out_of_range():
    assert sc.threshold_weight(12.0, PARAMS) == 0.0


def test_threshold_weight_boundary_is_strict():
    assert sc.threshold_weight(8.0, PARAMS) == 0.0
    assert sc.threshold_weight(2.0, PARAMS) == 0.0


# --- evidence -----------------------------------------------------------------

def test_evidence_single_supporter():
    target = obs("t", 4.0)
    assert sc.compute_evidence(target, [obs("n", 4.5)], PARAMS) == 1.0


def test_evidence_five_of_six_support():
    target = obs("t", 4.0)
    neighbours = [obs(f"n{i}", 4.0) for i in range(5)] + [obs("n5", 15.0)]
    got = sc.compute_evidence(target, neighbours, PARAMS)
    assert got == pytest.approx((5 - 1) / 6, abs=1e-12)


def test_evidence_all_refute():
    target = obs("t", 4.0)
    neighbours = [obs("n0", 15.0), obs("n1", -10.0)]
    assert sc.compute_evidence(target, neighbours, PARAMS) == -1.0


def test_evidence_empty_neighbours():
    with pytest.raises(EmptyNeighbourSet):
        sc.compute_evidence(obs("t", 4.0), [], PARAMS)


def test_evidence_rejects_epoch_mismatch():
    with pytest.raises(InvalidObservation):
        sc.compute_evidence(obs("t", 4.0, epoch=0), [obs("n", 4.0, epoch=1)], PARAMS)


def test_evidence_clamp_mode_floors_at_zero():
    clamped = sc.TrmParams(clamp_evidence=True)
    target = obs("t", 4.0)
    neighbours = [obs("n0", 15.0), obs("n1", -10.0)]
    assert sc.compute_evidence(target, neighbours, clamped) == 0.0


# --- commodity trust: batch ---------------------------------------------------

def test_batch_empty_history_is_default_score():
    assert sc.commodity_trust_batch(sc.ObservationMatrix([]), PARAMS) == 0.0


def test_batch_all_perfect_closed_form():
    m = sc.ObservationMatrix([perfect_row(e) for e in range(3)])
    assert sc.commodity_trust_batch(m, PARAMS) == pytest.approx(
        1 - 0.85**3, abs=1e-12
    )


def test_batch_two_sensors_one_round():
    m = matrix_of([[4.0, 4.5]], [[0.9, 0.8]])
    # (0.15/2) * (1*0.9*0.8 + 1*0.8*0.9)
    assert sc.commodity_trust_batch(m, PARAMS) == pytest.approx(0.108, abs=1e-12)


def test_batch_insufficient_redundancy():
    params = sc.TrmParams(min_sensors=3)
    m = matrix_of([[4.0, 4.5]], [[1.0, 1.0]])
    with pytest.raises(InsufficientRedundancy):
        sc.commodity_trust_batch(m, params)


def test_ragged_rows_rejected():
    rows = [perfect_row(0, sensors=3), perfect_row(1, sensors=2)]
    with pytest.raises(RaggedMatrix):
        sc.ObservationMatrix(rows)


def test_mixed_epoch_row_rejected():
    row = [obs("a", 4.0, epoch=0), obs("b", 4.0, epoch=1)]
    with pytest.raises(RaggedMatrix):
        sc.ObservationMatrix([row])


# --- commodity trust: streaming step ------------------------------------------

def test_step_first_perfect_round():
    got = sc.commodity_trust_step(0.0, perfect_row(), PARAMS)
    assert got == pytest.approx(0.15, abs=1e-12)


def test_step_twice_matches_closed_form():
    t = sc.commodity_trust_step(0.0, perfect_row(0), PARAMS)
    t = sc.commodity_trust_step(t, perfect_row(1), PARAMS)
    assert t == pytest.approx(1 - 0.85**2, abs=1e-12)


def test_step_decay_from_cap_on_out_of_range_rows():
    row = perfect_row(value=15.0)
    assert sc.commodity_trust_step(1.0, row, PARAMS) == pytest.approx(0.85, abs=1e-12)


def test_step_insufficient_redundancy():
    params = sc.TrmParams(min_sensors=3)
    with pytest.raises(InsufficientRedundancy):
        sc.commodity_trust_step(0.0, perfect_row(sensors=2), params)


# --- trade score ----------------------------------------------------------------

def test_trade_score_single_fulfilled():
    assert sc.trade_score(sc.TradeOutcome(((1.0, True),))) == 1.0


def test_trade_score_mixed():
    outcome = sc.TradeOutcome(((0.8, True), (0.5, False)))
    assert sc.trade_score(outcome) == pytest.approx(0.15, abs=1e-12)


def test_trade_score_all_unfulfilled():
    outcome = sc.TradeOutcome(((1.0, False), (1.0, False)))
    assert sc.trade_score(outcome) == -1.0


def test_trade_score_empty_rejected():
    with pytest.raises(EmptyAgreementSet):
        sc.trade_score(sc.TradeOutcome(()))


def test_trade_outcome_weight_out_of_range():
    with pytest.raises(InvalidAgreement):
        sc.TradeOutcome(((1.2, True),))


# --- participant trust / endorsement -------------------------------------------

def test_participant_trust_first_step():
    assert sc.participant_trust_step(0.0, 1.0, 0.85) == pytest.approx(0.15, abs=1e-12)


def test_participant_trust_two_steps_closed_form():
    t = sc.participant_trust_step(0.0, 1.0, 0.85)
    t = sc.participant_trust_step(t, 1.0, 0.85)
    assert t == pytest.approx(1 - 0.85**2, abs=1e-12)


def test_participant_trust_negative_score():
    assert sc.participant_trust_step(0.5, -1.0, 0.85) == pytest.approx(
        0.275, abs=1e-12
    )


def test_endorsement_first_step():
    assert sc.endorsement_step(0.0, 1.0, 0.85) == pytest.approx(0.15, abs=1e-12)


def test_endorsement_zero_rating():
    assert sc.endorsement_step(0.0, 0.0, 0.85) == 0.0


def test_endorsement_weighted_step():
    assert sc.endorsement_step(0.6, 0.5, 0.9) == pytest.approx(0.59, abs=1e-12)


def test_endorsement_rating_out_of_range():
    with pytest.raises(RatingOutOfRange):
        sc.endorsement_step(0.0, 1.2, 0.85)


# --- reputation -----------------------------------------------------------------

def test_reputation_all_ones_fixed_point():
    assert sc.reputation([1.0, 1.0], 1.0, 1.0, PARAMS) == pytest.approx(
        1.0, abs=1e-12
    )


def test_reputation_zero_state():
    assert sc.reputation([], 0.0, 0.0, PARAMS) == 0.0


def test_reputation_equal_component_blend():
    assert sc.reputation([0.6], 0.3, 0.9, PARAMS) == pytest.approx(0.6, abs=1e-12)


# --- hypothesis strategies --------------------------------------------------------

def params_strategy():
    return st.builds(
        sc.TrmParams,
        decay=st.floats(0.05, 1.0),
        support_tolerance=st.floats(0.0, 5.0),
        clamp_evidence=st.booleans(),
    )


def history_strategy(max_epochs=50, max_sensors=10, min_sensors=2):
    def build(draw_tuple):
        epochs, sensors, cells = draw_tuple
        values = [[cells[(i * sensors + j) * 2] for j in range(sensors)] for i in range(epochs)]
        confs = [
            [cells[(i * sensors + j) * 2 + 1] for j in range(sensors)]
            for i in range(epochs)
        ]
        return values, confs

    def draw(epochs, sensors):
        n = epochs * sensors * 2
        return st.tuples(
            st.just(epochs),
            st.just(sensors),
            st.lists(st.floats(-20.0, 40.0), min_size=n, max_size=n),
        )

    return (
        st.tuples(
            st.integers(1, max_epochs), st.integers(min_sensors, max_sensors)
        )
        .flatmap(lambda t: draw(*t))
        .map(build)
        .map(_normalise_history)
    )


def _normalise_history(history):
    values, confs = history
    # second channel doubles as confidence: squash into [0, 1]
    confs = [[abs(c) % 1.0 for c in row] for row in confs]
    return values, confs


@settings(max_examples=150, deadline=None)
@given(history=history_strategy(), data=params_strategy())
def test_batch_equals_step_fold(history, data):
    values, confs = history
    params = data
    m = matrix_of(values, confs)
    batch_raw = sc.commodity_trust_batch_raw(m, params)
    folded = 0.0
    for e, (vrow, crow) in enumerate(zip(values, confs)):
        row = [obs(f"s{j}", v, c, e) for j, (v, c) in enumerate(zip(vrow, crow))]
        folded = sc.commodity_trust_step(folded, row, params)
    assert folded == pytest.approx(batch_raw, abs=1e-12)
    assert sc.clamp_trust(folded, params) == pytest.approx(
        sc.commodity_trust_batch(m, params), abs=1e-12
    )


@settings(max_examples=100, deadline=None)
@given(history=history_strategy(max_epochs=4, max_sensors=3), data=params_strategy())
def test_batch_matches_bruteforce_oracle(history, data):
    values, confs = history
    got = sc.commodity_trust_batch_raw(matrix_of(values, confs), data)
    want = oracle_commodity_trust_raw(values, confs, data)
    assert got == pytest.approx(want, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(
    scores=st.lists(st.floats(-1.0, 1.0), min_size=1, max_size=50),
    decay=st.floats(0.05, 0.999),
)
def test_participant_trust_fold_matches_batch_sum(scores, decay):
    folded = 0.0
    for s in scores:
        folded = sc.participant_trust_step(folded, s, decay)
    assert folded == pytest.approx(oracle_decayed_sum(scores, decay), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(
    ratings=st.lists(st.floats(0.0, 1.0), min_size=1, max_size=50),
    decay=st.floats(0.05, 0.999),
)
def test_endorsement_fold_matches_batch_sum_and_bounds(ratings, decay):
    folded = 0.0
    for r in ratings:
        folded = sc.endorsement_step(folded, r, decay)
        assert 0.0 <= folded <= 1.0
    assert folded == pytest.approx(oracle_decayed_sum(ratings, decay), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(
    epochs=st.integers(1, 100),
    decay=st.floats(0.05, 0.999),
    cap=st.floats(0.1, 5.0),
)
def test_geometric_convergence_closed_form(epochs, decay, cap):
    params = sc.TrmParams(decay=decay, in_range_weight=cap)
    t = 0.0
    for e in range(epochs):
        t = sc.commodity_trust_step(t, perfect_row(e), params)
    assert t == pytest.approx(cap * (1 - decay**epochs), abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(
    d1=st.floats(0.05, 0.99),
    d2=st.floats(0.05, 0.99),
    epochs=st.integers(1, 60),
)
def test_lower_decay_converges_faster(d1, d2, epochs):
    lo, hi = sorted((d1, d2))
    t_lo = t_hi = 0.0
    for e in range(epochs):
        row = perfect_row(e)
        t_lo = sc.commodity_trust_step(t_lo, row, sc.TrmParams(decay=lo))
        t_hi = sc.commodity_trust_step(t_hi, row, sc.TrmParams(decay=hi))
        # near saturation the analytic gap drops below one ulp of 1.0
        assert t_lo >= t_hi - 1e-12


@settings(max_examples=150, deadline=None)
@given(history=history_strategy(max_epochs=20, max_sensors=6), data=params_strategy())
def test_clamped_trust_stays_in_range(history, data):
    values, confs = history
    got = sc.commodity_trust_batch(matrix_of(values, confs), data)
    assert data.out_of_range_weight <= got <= data.in_range_weight


@settings(max_examples=150, deadline=None)
@given(
    values=st.lists(st.floats(-20.0, 40.0), min_size=2, max_size=10),
    confs=st.lists(st.floats(0.0, 1.0), min_size=10, max_size=10),
)
def test_evidence_raw_bounds(values, confs):
    row = [obs(f"s{i}", v, confs[i]) for i, v in enumerate(values)]
    got = sc.compute_evidence(row[0], row[1:], PARAMS)
    # 1e-12 headroom for accumulated rounding in the confidence sum
    assert -1.0 - 1e-12 <= got <= 1.0 + 1e-12


@settings(max_examples=100, deadline=None)
@given(
    supports=st.lists(st.booleans(), min_size=1, max_size=10),
    confs=st.lists(st.floats(0.0, 1.0), min_size=10, max_size=10),
)
def test_evidence_antisymmetry(supports, confs):
    target = obs("t", 4.0)
    near, far = 4.0, 40.0
    fwd = [
        obs(f"n{i}", near if s else far, confs[i]) for i, s in enumerate(supports)
    ]
    rev = [
        obs(f"n{i}", far if s else near, confs[i]) for i, s in enumerate(supports)
    ]
    assert sc.compute_evidence(target, fwd, PARAMS) == -sc.compute_evidence(
        target, rev, PARAMS
    )


@settings(max_examples=100, deadline=None)
@given(
    trusts=st.lists(st.floats(0.0, 1.0), max_size=5),
    behaviour=st.floats(0.0, 1.0),
    endorsement=st.floats(0.0, 1.0),
    scale=st.floats(0.0, 2.0),
)
def test_reputation_scales_linearly(trusts, behaviour, endorsement, scale):
    base = sc.reputation(trusts, behaviour, endorsement, PARAMS)
    scaled = sc.reputation(
        [scale * t for t in trusts], scale * behaviour, scale * endorsement, PARAMS
    )
    assert scaled == pytest.approx(scale * base, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(
    scores=st.lists(st.floats(0.0, 1.0), min_size=1, max_size=60),
    decay=st.floats(0.05, 0.999),
)
def test_behaviour_trust_bounds_for_unit_scores(scores, decay):
    t = 0.0
    for s in scores:
        t = sc.participant_trust_step(t, s, decay)
        assert 0.0 <= t <= 1.0


def test_evidence_matches_oracle_on_row():
    values = [4.0, 4.4, 9.0, 3.8, 15.0]
    confs = [0.9, 0.8, 0.7, 1.0, 0.6]
    row = [obs(f"s{i}", v, c) for i, (v, c) in enumerate(zip(values, confs))]
    for j in range(len(row)):
        neighbours = row[:j] + row[j + 1 :]
        got = sc.compute_evidence(row[j], neighbours, PARAMS)
        want = oracle_evidence(values, confs, j, PARAMS.support_tolerance)
        assert got == pytest.approx(want, abs=1e-15)


def test_observation_confidence_validated():
    with pytest.raises(InvalidObservation):
        obs("s", 4.0, confidence=1.5)
