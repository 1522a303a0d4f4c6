import random

import pytest
from hypothesis import given, settings, strategies as st

from covote.groups import TEST_GROUP, production_group
from covote.pedersen import (
    VectorCommitment,
    commit,
    commit_combine,
    commit_weighted_combine,
    commitment_at_index,
    verify_share_against_commitment,
)
from covote.shamir import (
    Share,
    eval_poly,
    interpolate,
    shamir_share,
    share_linear_combine,
    share_polynomials,
)

G = TEST_GROUP
Q = G.q


def rng(seed=0):
    return random.Random(seed)


class TestGroup:
    def test_generators_have_exact_order_q(self):
        # brute force over the small group
        for gen in (G.g, G.h):
            e, order = gen, 1
            while e != 1:
                e = G.mul(e, gen)
                order += 1
            assert order == Q

    def test_generators_distinct_and_not_identity(self):
        assert G.g != G.h
        assert G.g != G.identity and G.h != G.identity

    def test_scalar_encoding_round_trip(self):
        for s in range(Q):
            assert G.decode_scalar(G.encode_scalar(s)) == s

    def test_element_encoding_round_trip(self):
        for x in range(Q):
            e = G.pow(G.g, x)
            assert G.decode_element(G.encode_element(e)) == e

    def test_element_decode_rejects_non_subgroup(self):
        # 166 = -1 is a non-residue mod 167, so not in the order-83 subgroup
        with pytest.raises(ValueError):
            G.decode_element((166).to_bytes(G.element_width, "big"))

    def test_production_group_basics(self):
        P = production_group()
        assert P.g != P.h
        assert P.pow(P.g, P.q) == P.identity
        e = P.pow(P.g, 12345)
        assert P.decode_element(P.encode_element(e)) == e
        assert P.mul(e, P.inv(e)) == P.identity


class TestCommit:
    def test_zero_zero_is_identity(self):
        assert commit(G, 0, 0) == G.identity

    def test_one_zero_is_g(self):
        assert commit(G, 1, 0) == G.g

    def test_direct_modular_exponentiation_oracle(self):
        assert commit(G, 2, 3) == (4**2 * 9**3) % 167

    def test_combine_identity(self):
        c = commit(G, 7, 11)
        assert commit_combine(G, commit(G, 0, 0), c) == c

    def test_combine_homomorphism(self):
        assert commit_combine(G, commit(G, 1, 2), commit(G, 0, 3)) == commit(G, 1, 5)

    def test_combine_inverse_exponents(self):
        c = commit_combine(G, commit(G, 5, 9), commit(G, Q - 5, Q - 9))
        assert c == G.identity

    def test_hiding_uniform_over_subgroup(self):
        # for fixed x, commit(x, r) over all r covers every subgroup element once
        for x in (0, 1, 42):
            seen = [commit(G, x, r) for r in range(Q)]
            assert len(set(seen)) == Q

    def test_binding_by_exhaustion(self):
        # every pair of distinct openings of one commitment satisfies
        # x - x' = dlog_g(h) * (r' - r): a binding break is exactly a dlog
        # computation, so none exists for a harness that does not know it
        dlog = next(d for d in range(Q) if G.pow(G.g, d) == G.h)
        by_commit = {}
        for x in range(Q):
            for r in range(Q):
                by_commit.setdefault(commit(G, x, r), []).append((x, r))
        for openings in by_commit.values():
            x0, r0 = openings[0]
            for x, r in openings[1:]:
                assert r != r0  # same blinding would break binding outright
                assert (x0 - x) % Q == dlog * (r - r0) % Q


class TestShamir:
    def test_k1_every_share_is_the_secret(self):
        shares, _ = shamir_share(G, 37, 5, k=1, n=6, rng=rng())
        assert all(s.vote_share == 37 and s.blinding_share == 5 for s in shares)

    def test_forced_polynomial_oracle(self):
        # f = 1 + 2X, b = 0 over Z_83
        shares, vc = share_polynomials(G, [1, 2], [0, 0], n=3)
        assert [(s.index, s.vote_share, s.blinding_share) for s in shares] == [
            (1, 3, 0),
            (2, 5, 0),
            (3, 7, 0),
        ]
        assert interpolate(G, shares[:2], k=2) == (1, 0)

    def test_interpolate_any_k_shares_recovers_secret(self):
        r = rng(7)
        shares, _ = shamir_share(G, 29, 61, k=3, n=7, rng=r)
        for _ in range(20):
            subset = r.sample(shares, 3)
            assert interpolate(G, subset, k=3) == (29, 61)

    def test_interpolate_single_share_k1(self):
        assert interpolate(G, [Share(4, 9, 2)], k=1) == (9, 2)

    def test_interpolate_zero_shares(self):
        zero = [Share(i, 0, 0) for i in range(1, 4)]
        assert interpolate(G, zero, k=3) == (0, 0)

    def test_interpolate_errors(self):
        with pytest.raises(ValueError):
            interpolate(G, [Share(1, 1, 1)], k=2)
        with pytest.raises(ValueError):
            interpolate(G, [Share(1, 1, 1), Share(1, 2, 2)], k=2)

    def test_share_parameter_errors(self):
        with pytest.raises(ValueError):
            shamir_share(G, 1, 0, k=5, n=4, rng=rng())
        with pytest.raises(ValueError):
            shamir_share(G, 1, 0, k=2, n=Q, rng=rng())

    def test_linear_combine_single_term(self):
        s = Share(2, 10, 20)
        assert share_linear_combine(G, [(s, 1)]) == s

    def test_linear_combine_zero_weights(self):
        s = Share(2, 10, 20)
        assert share_linear_combine(G, [(s, 0), (Share(2, 5, 5), 0)]) == Share(2, 0, 0)

    def test_linear_combine_index_mismatch(self):
        with pytest.raises(ValueError):
            share_linear_combine(G, [(Share(1, 1, 1), 1), (Share(2, 1, 1), 1)])

    def test_weighted_combine_then_interpolate(self):
        # sharings of 1 and 0, weights 5 and 3: tally must be 5
        r = rng(3)
        sh1, _ = shamir_share(G, 1, 11, k=2, n=4, rng=r)
        sh0, _ = shamir_share(G, 0, 7, k=2, n=4, rng=r)
        combined = [
            share_linear_combine(G, [(sh1[i], 5), (sh0[i], 3)]) for i in range(4)
        ]
        vote, blinding = interpolate(G, combined[:2], k=2)
        assert vote == 5
        assert blinding == (5 * 11 + 3 * 7) % Q

    @given(
        secrets=st.lists(st.integers(0, Q - 1), min_size=1, max_size=4),
        weights=st.lists(st.integers(0, 10), min_size=1, max_size=4),
        data=st.data(),
    )
    @settings(max_examples=60, deadline=None)
    def test_homomorphism_property(self, secrets, weights, data):
        m = min(len(secrets), len(weights))
        secrets, weights = secrets[:m], weights[:m]
        r = rng(data.draw(st.integers(0, 2**31)))
        sharings = [shamir_share(G, s, G.random_scalar(r), 2, 4, r)[0] for s in secrets]
        combined = [
            share_linear_combine(
                G, [(sharings[t][i], weights[t]) for t in range(m)]
            )
            for i in range(4)
        ]
        vote, _ = interpolate(G, combined[:2], k=2)
        assert vote == sum(w * s for w, s in zip(weights, secrets)) % Q

    def test_secrecy_exhaustive_k_le_3(self):
        # any k-1 shares admit exactly one consistent polynomial per candidate
        # secret, for both 0 and 1: enumeration over all polynomials in Z_83
        for k, observed_indices in ((2, (1,)), (3, (1, 2))):
            for secret in (0, 1):
                # count polynomials of degree k-1 with f(0)=secret matching
                # each observable share pattern
                patterns = {}
                for coeffs in _all_coeffs(secret, k):
                    obs = tuple(eval_poly(coeffs, i, Q) for i in observed_indices)
                    patterns[obs] = patterns.get(obs, 0) + 1
                # uniform: every observation pattern equally likely
                assert set(patterns.values()) == {1}
                assert len(patterns) == Q ** (k - 1)


def _all_coeffs(secret, k):
    if k == 2:
        return ([secret, a] for a in range(Q))
    return ([secret, a, b] for a in range(Q) for b in range(Q))


class TestVectorCommitment:
    def test_share_verifies_against_own_commitment(self):
        shares, vc = shamir_share(G, 1, 9, k=2, n=4, rng=rng(1))
        for s in shares:
            assert verify_share_against_commitment(
                G, s.index, s.vote_share, s.blinding_share, vc
            )

    def test_tampered_share_rejected(self):
        shares, vc = shamir_share(G, 1, 9, k=2, n=4, rng=rng(1))
        s = shares[0]
        assert not verify_share_against_commitment(
            G, s.index, (s.vote_share + 1) % Q, s.blinding_share, vc
        )

    def test_weighted_combine_single_unchanged(self):
        _, vc = shamir_share(G, 1, 9, k=2, n=4, rng=rng(1))
        assert commit_weighted_combine(G, [(vc, 1)]) == vc

    def test_weighted_combine_all_zero_weights(self):
        _, vc = shamir_share(G, 1, 9, k=2, n=4, rng=rng(1))
        out = commit_weighted_combine(G, [(vc, 0)])
        assert all(c == G.identity for c in out.coeff_commits)

    def test_weighted_combine_matches_combined_coefficients(self):
        # recompute commitments from explicitly combined coefficients
        f1, b1, f2, b2 = [5, 7], [2, 9], [0, 4], [8, 1]
        _, vc1 = share_polynomials(G, f1, b1, n=4)
        _, vc2 = share_polynomials(G, f2, b2, n=4)
        combined = commit_weighted_combine(G, [(vc1, 5), (vc2, 3)])
        fc = [(5 * a + 3 * c) % Q for a, c in zip(f1, f2)]
        bc = [(5 * a + 3 * c) % Q for a, c in zip(b1, b2)]
        _, expected = share_polynomials(G, fc, bc, n=4)
        assert combined == expected

    def test_combined_share_verifies_against_combined_commitment(self):
        r = rng(5)
        sh1, vc1 = shamir_share(G, 1, 3, k=2, n=4, rng=r)
        sh2, vc2 = shamir_share(G, 0, 8, k=2, n=4, rng=r)
        vc = commit_weighted_combine(G, [(vc1, 5), (vc2, 3)])
        for i in range(4):
            s = share_linear_combine(G, [(sh1[i], 5), (sh2[i], 3)])
            assert verify_share_against_commitment(
                G, s.index, s.vote_share, s.blinding_share, vc
            )

    def test_length_mismatch(self):
        _, vc2 = shamir_share(G, 1, 9, k=2, n=4, rng=rng(1))
        _, vc3 = shamir_share(G, 1, 9, k=3, n=4, rng=rng(1))
        with pytest.raises(ValueError):
            commit_weighted_combine(G, [(vc2, 1), (vc3, 1)])

    def test_commitment_at_index_matches_polynomial(self):
        f, b = [4, 2, 7], [1, 0, 3]
        _, vc = share_polynomials(G, f, b, n=5)
        for i in range(1, 6):
            assert commitment_at_index(G, vc, i) == commit(
                G, eval_poly(f, i, Q), eval_poly(b, i, Q)
            )

    def test_encode_round_trip(self):
        _, vc = shamir_share(G, 1, 9, k=3, n=4, rng=rng(2))
        assert VectorCommitment.decode(G, vc.encode(G)) == vc
