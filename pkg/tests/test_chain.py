import pytest

from stakesim import chain as C
from stakesim.chain import DEPOSIT_GWEI, GWEI_PER_ETH, Status
from stakesim.errors import AlreadyQueued, AmountNot32Eth, NotActive, UnknownValidator


def test_churn_limit_minimum_clamp():
    assert C.churn_limit(0) == 4
    assert C.churn_limit(262143) == 4


def test_churn_limit_tiers():
    assert C.churn_limit(655360) == 10
    assert C.churn_limit(589824) == 9
    assert C.churn_limit(655359) == 9


def test_submit_deposit_bootstrap():
    st = C.ChainState()
    vid = C.submit_deposit(st, "solo", DEPOSIT_GWEI)
    assert st.activation_queue == [vid]
    assert st.validators[vid].status is Status.PENDING_QUEUED


def test_submit_deposit_rejects_wrong_amount():
    st = C.ChainState()
    with pytest.raises(AmountNot32Eth):
        C.submit_deposit(st, "solo", 31 * GWEI_PER_ETH)
    with pytest.raises(AmountNot32Eth):
        C.submit_deposit(st, "solo", DEPOSIT_GWEI + 1)


def test_deposit_queue_is_fifo():
    st = C.ChainState()
    ids = [C.submit_deposit(st, f"e{i}", DEPOSIT_GWEI) for i in range(100)]
    assert st.activation_queue == ids


def test_request_exit():
    st = C.bootstrap(3)
    C.request_exit(st, 0)
    assert st.validators[0].status is Status.EXIT_QUEUED
    assert st.exit_queue == [0]
    with pytest.raises(AlreadyQueued):
        C.request_exit(st, 0)
    C.request_exit(st, 2)
    assert st.exit_queue == [0, 2]


def test_request_exit_requires_active():
    st = C.ChainState()
    vid = C.submit_deposit(st, "solo", DEPOSIT_GWEI)
    with pytest.raises(NotActive):
        C.request_exit(st, vid)
    with pytest.raises(UnknownValidator):
        C.request_exit(st, 999)


def test_process_epoch_activation_churn():
    # 650000 active -> churn 9; a queue of 25 drains in 3 epochs (9, 9, 7)
    st = C.bootstrap(650000, apr_bps=0)
    for i in range(25):
        C.submit_deposit(st, f"q{i}", DEPOSIT_GWEI)
    r1 = C.process_epoch(st)
    assert (r1.activated, r1.activation_queue_len) == (9, 16)
    r2 = C.process_epoch(st)
    assert (r2.activated, r2.activation_queue_len) == (9, 7)
    r3 = C.process_epoch(st)
    assert (r3.activated, r3.activation_queue_len) == (7, 0)


def test_activation_fifo_order():
    st = C.bootstrap(10, apr_bps=0)
    ids = [C.submit_deposit(st, f"q{i}", DEPOSIT_GWEI) for i in range(10)]
    C.process_epoch(st)
    C.process_epoch(st)
    C.process_epoch(st)
    epochs = [st.validators[v].activation_epoch for v in ids]
    activated = [e for e in epochs if e is not None]
    assert activated == sorted(activated)
    assert len(activated) >= 8  # min churn 4 per epoch, at least 2 full epochs


def test_empty_queues_report_zero():
    st = C.bootstrap(5, apr_bps=0)
    r = C.process_epoch(st)
    assert r.activated == 0 and r.exited == 0


def test_eth_conservation_without_apr_or_slash():
    st = C.bootstrap(50, apr_bps=0)
    total = st.total_balance()
    for i in range(5):
        C.request_exit(st, i)
    for _ in range(10):
        C.process_epoch(st)
        assert st.total_balance() == total


def test_slash_applies_next_epoch():
    st = C.bootstrap(5, apr_bps=0)
    total = st.total_balance()
    C.apply_slash(st, 0, GWEI_PER_ETH)
    assert st.validators[0].balance == DEPOSIT_GWEI  # not yet applied
    r = C.process_epoch(st)
    assert r.slashed_gwei == GWEI_PER_ETH
    assert st.validators[0].balance == DEPOSIT_GWEI - GWEI_PER_ETH
    assert st.total_balance() == total - GWEI_PER_ETH
    for v in list(st.validators.values())[1:]:
        assert v.balance == DEPOSIT_GWEI


def test_full_slash_zeroes_balance():
    st = C.bootstrap(2, apr_bps=0)
    C.apply_slash(st, 0, DEPOSIT_GWEI)
    C.process_epoch(st)
    assert st.validators[0].balance == 0


def test_overslash_is_clamped():
    st = C.bootstrap(2, apr_bps=0)
    clamped = C.apply_slash(st, 0, 100 * DEPOSIT_GWEI)
    assert clamped == DEPOSIT_GWEI
    C.process_epoch(st)
    assert st.validators[0].balance == 0


def test_frozen_earns_no_rewards_and_stays_frozen():
    st = C.bootstrap(2, apr_bps=380)
    C.apply_slash(st, 0, GWEI_PER_ETH)
    assert st.validators[0].status is Status.FROZEN
    bal_after_slash = None
    for _ in range(10):
        C.process_epoch(st)
        if bal_after_slash is None:
            bal_after_slash = st.validators[0].balance
        assert st.validators[0].status is Status.FROZEN
        assert st.validators[0].balance == bal_after_slash
    # the untouched validator did accrue
    assert st.validators[1].balance > DEPOSIT_GWEI


def test_reward_accrues_on_capped_balance():
    st = C.bootstrap(1, apr_bps=380)
    per_epoch = DEPOSIT_GWEI * 380 // (10000 * 225 * 365)
    C.process_epoch(st)
    assert st.validators[0].balance == DEPOSIT_GWEI + per_epoch
    # push balance above the cap: accrual stays at the capped rate
    st.validators[0].balance = DEPOSIT_GWEI * 2
    C.process_epoch(st)
    assert st.validators[0].balance == DEPOSIT_GWEI * 2 + per_epoch


def test_exit_budget_bound():
    st = C.bootstrap(650000, apr_bps=0)
    for i in range(30):
        C.request_exit(st, i)
    r = C.process_epoch(st)
    assert r.exited == 9  # churn_limit(650000)
    assert st.validators[0].status is Status.EXITED
    assert st.validators[0].exit_epoch == 1
