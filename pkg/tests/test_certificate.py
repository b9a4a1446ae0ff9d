import dataclasses
from pathlib import Path

import pytest

from chowcert.certificate import (
    Certificate,
    CertificateError,
    format_certificate,
    integrity_digest,
    load_certificate,
    parse_certificate,
    save_certificate,
)

DATA = Path(__file__).parent / "data"


def make_cert(**overrides):
    base = dict(
        seed=42,
        prime=20201,
        n=2,
        r=1,
        points=(((1, 2, 3), (4, 5, 6), (7, 8, 9)),),
        f0=(1, 2, 3),
        tangent_rank=7,
        tangent_expected=7,
        hessian_rank=6,
        hessian_expected=6,
        verdict=True,
        attempt=0,
        resamples=0,
        seconds=0.01,
    )
    base.update(overrides)
    return Certificate(**base)


class TestRoundTrip:
    def test_emit_parse(self):
        cert = make_cert()
        parsed = parse_certificate(format_certificate(cert))
        assert parsed == cert

    def test_file_round_trip(self, tmp_path):
        cert = make_cert()
        path = tmp_path / "cert.txt"
        save_certificate(cert, path)
        assert load_certificate(path) == cert

    def test_without_check_line(self):
        cert = make_cert()
        text = format_certificate(cert, check=False)
        assert "check" not in text
        assert parse_certificate(text) == cert

    def test_padding_ignored_on_parse(self):
        text = (
            "seed = 1\nprime = 7\nn = 2\nr = 1\n"
            "k_0 = [   1 2    3]\nl_0 = [4 5 6]\nm_0 = [1    1 1]\n"
            "f_0 = [0 1 2]\n"
            "tangent_rank = 7/7\nhessian_rank = 6 /6\n"
            "verdict = not-1-TWD TRUE\n"
        )
        cert = parse_certificate(text)
        assert cert.points[0][0] == (1, 2, 3)
        assert cert.tangent_rank == 7

    def test_emit_matches_pinned_grammar(self):
        lines = format_certificate(make_cert()).splitlines()
        assert lines[0].startswith("seed = ")
        assert lines[1] == "prime = 20201"
        assert lines[4].startswith("k_0 = [")
        assert lines[7].startswith("f_0 = [")
        assert lines[8] == "tangent_rank = 7 / 7"
        assert lines[9] == "hessian_rank = 6 / 6"
        assert lines[10] == "verdict = not-1-TWD TRUE"


class TestValidation:
    def test_missing_line(self):
        text = "seed = 1\nprime = 7\nn = 2\n"
        with pytest.raises(CertificateError, match="missing line"):
            parse_certificate(text)

    def test_entry_out_of_range(self):
        cert = make_cert(points=(((1, 2, 30000), (4, 5, 6), (7, 8, 9)),))
        with pytest.raises(CertificateError, match="outside"):
            parse_certificate(format_certificate(cert, check=False))

    def test_composite_prime(self):
        text = format_certificate(make_cert(), check=False).replace(
            "prime = 20201", "prime = 20202"
        )
        with pytest.raises(CertificateError, match="not prime"):
            parse_certificate(text)

    def test_wrong_vector_length(self):
        text = format_certificate(make_cert(), check=False).replace(
            "k_0 = [    1     2     3]", "k_0 = [1 2]"
        )
        with pytest.raises(CertificateError, match="expected 3 entries"):
            parse_certificate(text)

    def test_f0_length_tied_to_codim(self):
        cert = make_cert(f0=(1, 2))
        with pytest.raises(CertificateError, match="f_0"):
            parse_certificate(format_certificate(cert, check=False))

    def test_verdict_label_must_match_r(self):
        text = format_certificate(make_cert(), check=False).replace(
            "not-1-TWD", "not-2-TWD"
        )
        with pytest.raises(CertificateError, match="labels r"):
            parse_certificate(text)

    def test_no_normal_space_rejected(self):
        # n=2, r=2: (3n+1) r = 14 >= 10 leaves no free variables
        cert = make_cert(
            r=2,
            points=(
                ((1, 2, 3), (4, 5, 6), (7, 8, 9)),
                ((1, 1, 1), (2, 2, 2), (3, 3, 3)),
            ),
            f0=(),
        )
        with pytest.raises(CertificateError, match="normal directions"):
            parse_certificate(format_certificate(cert, check=False))

    def test_unknown_trailing_line(self):
        text = format_certificate(make_cert(), check=False) + "extra = 1\n"
        with pytest.raises(CertificateError, match="unknown line"):
            parse_certificate(text)

    def test_integrity_mismatch(self):
        cert = make_cert()
        text = format_certificate(cert)
        tampered = text.replace("seed = 42", "seed = 43")
        with pytest.raises(CertificateError, match="integrity"):
            parse_certificate(tampered)

    def test_integrity_covers_every_field(self):
        cert = make_cert()
        digest = integrity_digest(cert)
        for field in (
            "seed",
            "prime",
            "n",
            "r",
            "points",
            "f0",
            "tangent_rank",
            "hessian_rank",
            "verdict",
            "attempt",
        ):
            if field == "points":
                changed = dataclasses.replace(
                    cert, points=(((9, 2, 3), (4, 5, 6), (7, 8, 9)),)
                )
            elif field == "f0":
                changed = dataclasses.replace(cert, f0=(1, 2, 4))
            elif field == "verdict":
                changed = dataclasses.replace(cert, verdict=False)
            else:
                changed = dataclasses.replace(cert, **{field: getattr(cert, field) + 1})
            assert integrity_digest(changed) != digest, field

    def test_seconds_not_in_digest(self):
        cert = make_cert()
        assert integrity_digest(cert) == integrity_digest(
            dataclasses.replace(cert, seconds=99.0)
        )


class TestReferenceFixture:
    def test_parses(self):
        cert = load_certificate(DATA / "reference_certificate_n5.txt")
        assert cert.seed == 1591688259
        assert cert.prime == 20201
        assert (cert.n, cert.r) == (5, 3)
        assert cert.points[0][0] == (17068, 9508, 8836, 2681, 14273, 2196)
        assert cert.points[2][2] == (3018, 609, 15188, 18700, 1096, 13016)
        assert cert.f0 == (5257, 5355, 19748, 3457, 1773, 19861, 15532, 19684)
        assert cert.codim == 8
        assert cert.verdict is True
