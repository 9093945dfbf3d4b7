"""Exception hierarchy shared across the package.

Everything user-facing derives from VoxelightError so the service and the
CLI can map failures to HTTP status / exit codes uniformly.
"""


class VoxelightError(Exception):
    """Base for all input/validation errors raised by voxelight."""


class OutOfRange(VoxelightError):
    def __init__(self, field: str, value: float):
        self.field = field
        self.value = value
        super().__init__(f"{field}={value!r} outside [0, 1]")


class OutOfBounds(VoxelightError):
    def __init__(self, coord, dims):
        self.coord = tuple(coord)
        self.dims = tuple(dims)
        super().__init__(f"coordinate {self.coord} outside grid dims {self.dims}")


class UnknownMaterial(VoxelightError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown material preset: {name!r}")


class DegenerateNormal(VoxelightError):
    def __init__(self, norm: float):
        self.norm = norm
        super().__init__(f"normal vector is not unit length (|n|={norm!r})")


class UnknownScene(VoxelightError):
    def __init__(self, name: str, known):
        self.name = name
        self.known = sorted(known)
        super().__init__(
            f"unknown demo scene: {name!r} (valid: {', '.join(self.known)})"
        )


class FormatError(VoxelightError):
    """Base for cloud-file parse errors."""


class MalformedHeader(FormatError):
    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"malformed header at line {line_no}: {reason}")


class UnknownProperty(FormatError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown vertex property: {name!r}")


class OutOfRangeAttribute(FormatError):
    def __init__(self, record: int, field: str, value: float):
        self.record = record
        self.field = field
        self.value = value
        super().__init__(
            f"record {record}: attribute {field}={value!r} outside [0, 1]"
        )


class DuplicateVoxel(FormatError):
    def __init__(self, coord):
        self.coord = tuple(coord)
        super().__init__(f"duplicate voxel at {self.coord}")


class OutOfBoundsVoxel(FormatError):
    def __init__(self, coord, dims):
        self.coord = tuple(coord)
        self.dims = tuple(dims)
        super().__init__(f"voxel {self.coord} outside declared dims {self.dims}")


class TruncatedBody(FormatError):
    def __init__(self, expected: int, got: int):
        self.expected = expected
        self.got = got
        super().__init__(f"truncated body: expected {expected}, got {got}")


class SchemaError(VoxelightError):
    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"scene config error at {path or '<root>'}: {reason}")
