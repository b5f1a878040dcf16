from pydantic import BaseModel


# ── Verification suites ───────────────────────────────────────────────────────


class CheckResult(BaseModel):
    name: str
    passed: bool
    value: float | None = None
    limit: float | None = None
    detail: dict = {}


class SuiteReport(BaseModel):
    suite: str
    seed: int
    passed: bool
    checks: list[CheckResult]


class VerifyReport(BaseModel):
    seed: int
    passed: bool
    suites: list[SuiteReport]
