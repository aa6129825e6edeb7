from .codes import LdpcCode, encode, extract_info, make_regular_code, syndrome
from .decoder import DEFAULT_MAX_ITERATIONS, backend_name, decode, decode_batch

__all__ = [
    "LdpcCode",
    "make_regular_code",
    "encode",
    "extract_info",
    "syndrome",
    "decode",
    "decode_batch",
    "backend_name",
    "DEFAULT_MAX_ITERATIONS",
]
