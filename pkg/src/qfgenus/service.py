"""HTTP service exposing the same commands as the CLI.

Every endpoint answers ``{"exit_code": int, "payload": {...}}`` with the
exit code the CLI would return, so a remote CLI call behaves like a local one.
"""

from __future__ import annotations

from typing import Any, Literal

from fastapi import FastAPI
from pydantic import BaseModel, Field

from .commands import dispatch


class FormJSON(BaseModel):
    n: int | None = None
    rows: list[list[int | str]]


class SymbolJSON(BaseModel):
    n: int
    sig: int
    components: dict[str, list[dict[str, Any]]]


class CommandResult(BaseModel):
    exit_code: int
    payload: dict[str, Any]


class SymbolRequest(BaseModel):
    form: FormJSON
    factor: list[int] | None = None


class ValidateRequest(BaseModel):
    symbol: SymbolJSON


class LocalFormRequest(BaseModel):
    symbol: SymbolJSON
    p: int | None = None
    q: int | None = None
    seed: int | None = None


class FindTRequest(BaseModel):
    symbol: SymbolJSON
    seed: int | None = None


class GenerateRequest(BaseModel):
    symbol: SymbolJSON
    seed: int | None = None
    retries: int = Field(16, ge=1)
    trace: bool = False


class VerifyRequest(BaseModel):
    form: FormJSON
    symbol: SymbolJSON
    seed: int | None = None


class OracleRequest(BaseModel):
    kind: Literal["appendix-c", "rep-dim4", "equiv"]
    which: Literal["typeII", "typeI_even", "typeI_odd"] | None = None
    literal: bool = False
    a: FormJSON | None = None
    b: FormJSON | None = None
    p: int | None = None
    k: int | None = None
    brute: bool = False
    seed: int | None = None


app = FastAPI(title="qfgenus", version="0.1.0")


def _run(command: str, req: BaseModel) -> CommandResult:
    code, payload = dispatch(command, **req.model_dump(exclude_none=True))
    return CommandResult(exit_code=code, payload=payload)


@app.post("/symbol", response_model=CommandResult)
def symbol(req: SymbolRequest) -> CommandResult:
    return _run("symbol", req)


@app.post("/validate", response_model=CommandResult)
def validate(req: ValidateRequest) -> CommandResult:
    return _run("validate", req)


@app.post("/localform", response_model=CommandResult)
def localform(req: LocalFormRequest) -> CommandResult:
    return _run("localform", req)


@app.post("/findt", response_model=CommandResult)
def findt(req: FindTRequest) -> CommandResult:
    return _run("findt", req)


@app.post("/generate", response_model=CommandResult)
def generate(req: GenerateRequest) -> CommandResult:
    return _run("generate", req)


@app.post("/verify", response_model=CommandResult)
def verify(req: VerifyRequest) -> CommandResult:
    return _run("verify", req)


@app.post("/oracle", response_model=CommandResult)
def oracle(req: OracleRequest) -> CommandResult:
    return _run("oracle", req)
