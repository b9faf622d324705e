"""Read-only HTTP/JSON query service over one immutable state snapshot.

Endpoints mirror the on-ledger query handler field-for-field:

* ``GET /participants/{id}/reputation`` — blended score plus its three
  components;
* ``GET /assets/{batch}/trust`` — current commodity trust;
* ``GET /assets/{batch}/provenance`` — ancestry DAG with per-node trust.

Unknown subjects return 404, malformed identifiers 400. The service
never writes; serving requests leaves the state root untouched.
"""

from __future__ import annotations

import re

from fastapi import FastAPI, HTTPException

from .contracts import run_query
from .errors import UnknownSubject
from .ledger import WorldState
from .scoring import TrmParams

ID_PATTERN = re.compile(r"^[A-Za-z0-9._:-]{1,64}$")


def _checked(subject: str) -> str:
    if not ID_PATTERN.match(subject):
        raise HTTPException(status_code=400, detail=f"malformed identifier {subject!r}")
    return subject


def build_app(state: WorldState, params: TrmParams) -> FastAPI:
    app = FastAPI(title="chaintrust query service", docs_url=None, redoc_url=None)

    def query(kind: str, subject: str) -> dict:
        try:
            return run_query(state, kind, _checked(subject), params)
        except UnknownSubject as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.get("/participants/{participant_id}/reputation")
    def participant_reputation(participant_id: str) -> dict:
        return query("reputation", participant_id)

    @app.get("/assets/{batch_id}/trust")
    def asset_trust(batch_id: str) -> dict:
        return query("trust", batch_id)

    @app.get("/assets/{batch_id}/provenance")
    def asset_provenance(batch_id: str) -> dict:
        return query("provenance", batch_id)

    return app


def serve(state: WorldState, params: TrmParams, host: str = "127.0.0.1", port: int = 8000) -> None:
    import uvicorn

    uvicorn.run(build_app(state, params), host=host, port=port, log_level="warning")
