"""API integration tests for symnf."""

from __future__ import annotations

import sys
from collections.abc import AsyncIterator
from pathlib import Path

import pytest
from httpx import ASGITransport, AsyncClient

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from symnf.main import app

RESONANT_MUS = {
    "mus": [{"num": 0, "im_num": 1}, {"num": 0, "im_num": 2}],
    "m_max": 3,
    "conditions": ["birkhoff"],
}


@pytest.fixture
async def client() -> AsyncIterator[AsyncClient]:
    async with (
        app.router.lifespan_context(app),
        AsyncClient(
            transport=ASGITransport(app=app),
            base_url="http://test",
        ) as ac,
    ):
        yield ac


@pytest.mark.anyio
async def test_health(client: AsyncClient):
    resp = await client.get("/health")
    assert resp.status_code == 200
    assert resp.json()["status"] == "ok"


@pytest.mark.anyio
async def test_metrics(client: AsyncClient):
    await client.post("/v1/resonance", json={"input": RESONANT_MUS})
    resp = await client.get("/metrics")
    assert resp.status_code == 200
    assert b"symnf_" in resp.content
    assert b'path="/v1/resonance"' in resp.content


@pytest.mark.anyio
async def test_list_commands(client: AsyncClient):
    resp = await client.get("/v1/commands")
    assert resp.status_code == 200
    ids = [c["id"] for c in resp.json()["commands"]]
    assert ids == ["symlog", "resonance", "maplog", "bnf", "oplog", "qbnf", "pipeline"]


@pytest.mark.anyio
async def test_resonance(client: AsyncClient):
    resp = await client.post("/v1/resonance", json={"input": RESONANT_MUS})
    assert resp.status_code == 200
    body = resp.json()
    assert body["header"]["command"] == "resonance"
    assert body["result"]["report"]["violations"][0]["k"] == [2, -1]


@pytest.mark.anyio
async def test_symlog_exact(client: AsyncClient):
    resp = await client.post(
        "/v1/symlog",
        json={"input": {"rows": [[1, 1], [0, 1]]}, "options": {"field": "exact"}},
    )
    assert resp.status_code == 200
    assert resp.json()["header"]["field"] == "exact"


@pytest.mark.anyio
async def test_precondition_conflict(client: AsyncClient):
    resp = await client.post("/v1/symlog", json={"input": {"rows": [[-2.0, 0.0], [0.0, -0.5]]}})
    assert resp.status_code == 409
    assert resp.json()["detail"]["code"] == "negative_eigenvalue"


@pytest.mark.anyio
async def test_non_symplectic_conflict(client: AsyncClient):
    resp = await client.post(
        "/v1/symlog",
        json={"input": {"rows": [[2.0, 0.0], [0.0, 2.0]]}, "options": {"field": "float"}},
    )
    assert resp.status_code == 409
    assert resp.json()["detail"]["message"] == "matrix is not symplectic"


@pytest.mark.anyio
async def test_schema_error(client: AsyncClient):
    resp = await client.post("/v1/symlog", json={"input": {"rows": [[1, 0]]}})
    assert resp.status_code == 422
    assert resp.json()["detail"]["code"] == "schema"


@pytest.mark.anyio
async def test_unknown_command(client: AsyncClient):
    resp = await client.post("/v1/frobnicate", json={"input": {}})
    assert resp.status_code == 404


@pytest.mark.anyio
async def test_bad_options(client: AsyncClient):
    resp = await client.post(
        "/v1/resonance", json={"input": RESONANT_MUS, "options": {"field": "complex"}}
    )
    assert resp.status_code == 422
