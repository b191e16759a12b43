from fastapi.testclient import TestClient
from main import app

client = TestClient(app)


# test the health check endpoint
def test_read_main():
    response = client.get("/")
    assert response.status_code == 200
    assert response.json() == {"message": "API health check successful"}


# test /v0/sets/
def test_read_set_cofinite():
    response = client.get("/v0/sets/", params={"set": "Z \\ {0}"})
    assert response.status_code == 200
    info = response.json()
    assert info["canonical"] == "Z \\ {0}"
    assert info["excluded_from_Z"] == [0]
    assert "cofinite-in-Z" in info["tags"]


def test_read_set_periodic():
    response = client.get("/v0/sets/", params={"set": "AP(3,0) | AP(3,1)"})
    assert response.status_code == 200
    assert response.json()["period"]["period"] == 3


def test_read_set_syntax_error():
    response = client.get("/v0/sets/", params={"set": "AP(2"})
    assert response.status_code == 422


# test /v0/witnesses/l1/
def test_read_l1_witness_periodic():
    response = client.get("/v0/witnesses/l1/", params={"set": "2Z", "f": "z^2"})
    assert response.status_code == 200
    certificate = response.json()
    assert certificate["verdict"] == "NonExtreme"
    assert certificate["criterion"] == "periodic witness"
    assert certificate["l1_witness"]["method"] == "periodic"


def test_read_l1_witness_cofinite():
    response = client.get("/v0/witnesses/l1/", params={"set": "Z \\ {0}", "f": "z"})
    assert response.status_code == 200
    witness = response.json()["l1_witness"]
    assert witness["method"] == "cofinite"
    assert witness["residual"] <= 1e-9


def test_read_l1_witness_not_normalized():
    response = client.get("/v0/witnesses/l1/", params={"set": "2Z", "f": "2*z^2"})
    assert response.status_code == 422
    assert "normalize" in response.json()["detail"]


def test_read_l1_witness_grid_out_of_range():
    response = client.get("/v0/witnesses/l1/", params={"set": "2Z", "f": "z^2", "grid_exp": 30})
    assert response.status_code == 422


# test /v0/witnesses/linf/
def test_read_linf_witness():
    response = client.get("/v0/witnesses/linf/", params={"set": "Z \\ {0}", "f": "(z+z^2)/2"})
    assert response.status_code == 200
    witness = response.json()["linf_witness"]
    assert witness["excluded"] == [0]
    assert max(witness["sup_plus"], witness["sup_minus"]) <= 1 + 1e-8


# test /v0/classifications/
def test_read_h1_classification_outer():
    response = client.get("/v0/classifications/h1/", params={"f": "1"})
    assert response.status_code == 200
    assert response.json()["verdict"] == "ExtremeByOuter"


def test_read_h1_classification_inner_factor():
    response = client.get("/v0/classifications/h1/", params={"f": "z"})
    assert response.status_code == 200
    certificate = response.json()
    assert certificate["verdict"] == "NonExtreme"
    assert certificate["factorization"]["blaschke_degree"] == 1


def test_read_h1_classification_not_analytic():
    response = client.get("/v0/classifications/h1/", params={"f": "zbar"})
    assert response.status_code == 422


def test_read_hinf_classification():
    response = client.get("/v0/classifications/hinf/", params={"f": "z"})
    assert response.status_code == 200
    assert response.json()["verdict"] == "ExtremeByLogIntegral"

    response = client.get("/v0/classifications/hinf/", params={"f": "(1+z)/2"})
    assert response.status_code == 200
    assert response.json()["verdict"] == "NonExtreme"


def test_read_linf_classification():
    response = client.get("/v0/classifications/linf/", params={"set": "Z \\ {0}", "f": "z"})
    assert response.status_code == 200
    assert response.json()["verdict"] == "ExtremeByUnimodular"


# test /v0/dset-certificates/
def test_read_dset_certificate():
    response = client.get("/v0/dset-certificates/", params={"set": "Zplus", "f": "z^3"})
    assert response.status_code == 200
    assert response.json()["verdict"] == "ExtremeByDSet"

    response = client.get("/v0/dset-certificates/", params={"set": "Zplus", "f": "(1+z)/2"})
    assert response.status_code == 200
    assert response.json()["verdict"] == "Inconclusive"


# test /v0/log-integrals/
def test_read_log_integral():
    response = client.get("/v0/log-integrals/", params={"f": "(1+z)/2"})
    assert response.status_code == 200
    report = response.json()
    assert report["classification"] == "finite"
    assert report["vanishing_points"][0]["order"] == 2


# test /v0/toeplitz-kernels/
def test_read_toeplitz_kernel():
    response = client.get("/v0/toeplitz-kernels/", params={"phi": "zbar^3", "cap": 5})
    assert response.status_code == 200
    assert response.json()["dimension"] == 3


# test /v0/oracle-results/
def test_read_oracle_result():
    response = client.get("/v0/oracle-results/", params={"set": "Zplus", "f": "(z+z^2)/2", "degree": 1})
    assert response.status_code == 200
    result = response.json()
    assert result["verdict"] == "NonExtreme"
    assert result["basis_size"] == 2
