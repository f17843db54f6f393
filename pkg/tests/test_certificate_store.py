from oracles import CertificateKind, exhaustive_max_code, max_non2cov_sperner


def test_save_and_get(store):
    certificate = max_non2cov_sperner(3)
    certificate_id = store.save_certificate(certificate)
    stored = store.get_certificate(certificate_id)
    assert stored.id == certificate_id
    assert stored.kind == CertificateKind.MAX_NON2COV_SPERNER
    assert stored.witness_family == certificate.witness_family
    assert stored.created_at is not None


def test_get_missing(store):
    assert store.get_certificate(99) is None


def test_list_filters(store):
    family_id = store.save_certificate(max_non2cov_sperner(3))
    code_id = store.save_certificate(exhaustive_max_code(2, 2, workers=1))
    assert [c.id for c in store.list_certificates()] == [family_id, code_id]
    assert [c.id for c in store.list_certificates(kind="max-code")] == [code_id]
    assert [c.id for c in store.list_certificates(n=3)] == [family_id]
    assert store.list_certificates(kind="max-code", n=3) == []


def test_code_witness_survives_storage(store):
    certificate = exhaustive_max_code(3, 2, workers=1)
    stored = store.get_certificate(store.save_certificate(certificate))
    assert stored.witness_code == certificate.witness_code
    assert stored.optimum == 4


def test_delete(store):
    certificate_id = store.save_certificate(max_non2cov_sperner(2))
    assert store.delete_certificate(certificate_id)
    assert not store.delete_certificate(certificate_id)
    assert store.list_certificates() == []
