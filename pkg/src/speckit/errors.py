"""Exception types shared across modules."""


class SpecError(Exception):
    """Base class for all speckit errors."""


class UnknownDevelopmentError(SpecError):
    def __init__(self, dev: str):
        super().__init__(f"development {dev} is not in the registry")
        self.dev = dev


class DevelopmentNotPresentError(SpecError):
    def __init__(self, req_id: str, dev: str):
        super().__init__(f"requirement {req_id} has no open DevBlock for {dev}")
        self.req_id = req_id
        self.dev = dev


class UnknownReleaseError(SpecError):
    def __init__(self, release: str):
        super().__init__(f"release {release} is not in the release universe")
        self.release = release


class ConflictingAliasError(SpecError):
    def __init__(self, alias: str, first: str, second: str):
        super().__init__(
            f"alias {alias!r} maps to both {first!r} and {second!r}"
        )
        self.alias = alias
        self.first = first
        self.second = second


class RegistryError(SpecError):
    """Malformed development registry file."""
