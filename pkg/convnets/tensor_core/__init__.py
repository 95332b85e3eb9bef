from .ops import Tensor, as_tensor, matmul, elementwise, reduce
from .ops import reshape, transpose2d, slice_, check_finite
from .serialization import encode_tensor, decode_tensor
from .serialization import save_bundle, load_bundle, atomic_write_bytes
