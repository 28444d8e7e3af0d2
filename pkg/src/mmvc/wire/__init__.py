from mmvc.wire.codec import (
    FILE_HEADER,
    FRAME_HEADER,
    MsgType,
    as_fg12_evaluation_key,
    as_fg12_function_key,
    body_size,
    decode,
    decode_frame,
    decode_payload,
    dumps,
    encode,
    encode_payload,
    frame,
    function_id,
    loads,
)
from mmvc.wire.net import Client, ComputeServer, KeyStore, RemoteError, read_frame, serve
from mmvc.wire.sizes import SchemeSizes, SizeReport, measure_sizes, size_report
