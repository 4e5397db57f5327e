"""Pluggable automatic-speech-recognition client.

The recognizer itself is external. Two transports are supported, chosen
by the endpoint descriptor:

* an HTTP URL: the WAV bytes are POSTed, the response is JSON
  ``{"text": ...}``
* anything else: a subprocess command line; the client writes the clip
  to a temporary WAV file, sends its path on the child's stdin, and
  reads the same JSON from the child's stdout

Both are bounded by a timeout; a recognizer that misses it raises
AsrTimeout and the caller falls back to audio-only fusion for that tick.
The MOODSPRING_ASR environment variable selects the descriptor.
"""

import json
import os
import shlex
import socket
import subprocess
import tempfile
import urllib.error
import urllib.request
from pathlib import Path

from ..data import wav_bytes, write_wav
from ..dsp import AudioClip
from ..errors import AsrError, AsrTimeout, InvalidInput

ENV_VAR = "MOODSPRING_ASR"


class AsrClient:
    def __init__(self, descriptor: str, timeout_s: float = 2.0):
        descriptor = descriptor.strip()
        if not descriptor:
            raise InvalidInput("empty ASR endpoint descriptor")
        if timeout_s <= 0:
            raise InvalidInput("ASR timeout must be positive")
        self.descriptor = descriptor
        self.timeout_s = timeout_s
        self._is_http = descriptor.startswith(("http://", "https://"))
        self._argv = None if self._is_http else shlex.split(descriptor)

    @classmethod
    def from_env(cls, timeout_s: float = 2.0):
        """AsrClient from MOODSPRING_ASR, or None when the variable is unset."""
        descriptor = os.environ.get(ENV_VAR, "").strip()
        return cls(descriptor, timeout_s) if descriptor else None

    def transcribe(self, clip: AudioClip) -> str:
        if self._is_http:
            return self._transcribe_http(clip)
        return self._transcribe_subprocess(clip)

    def _transcribe_http(self, clip: AudioClip) -> str:
        request = urllib.request.Request(
            self.descriptor, data=wav_bytes(clip), headers={"Content-Type": "audio/wav"}
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout_s) as response:
                payload = response.read()
        except (socket.timeout, TimeoutError) as exc:
            raise AsrTimeout(f"ASR endpoint timed out after {self.timeout_s}s") from exc
        except urllib.error.URLError as exc:
            if isinstance(exc.reason, (socket.timeout, TimeoutError)):
                raise AsrTimeout(f"ASR endpoint timed out after {self.timeout_s}s") from exc
            raise AsrError(f"ASR endpoint failed: {exc}") from exc
        return _parse_response(payload)

    def _transcribe_subprocess(self, clip: AudioClip) -> str:
        with tempfile.NamedTemporaryFile(suffix=".wav", delete=False) as handle:
            wav_path = Path(handle.name)
        try:
            write_wav(wav_path, clip)
            try:
                result = subprocess.run(
                    self._argv,
                    input=f"{wav_path}\n".encode(),
                    capture_output=True,
                    timeout=self.timeout_s,
                )
            except subprocess.TimeoutExpired as exc:
                raise AsrTimeout(f"ASR subprocess exceeded {self.timeout_s}s") from exc
            except OSError as exc:
                raise AsrError(f"could not launch ASR subprocess: {exc}") from exc
            if result.returncode != 0:
                raise AsrError(f"ASR subprocess exited {result.returncode}: {result.stderr.decode(errors='replace').strip()}")
            return _parse_response(result.stdout)
        finally:
            wav_path.unlink(missing_ok=True)


def _parse_response(payload: bytes) -> str:
    try:
        doc = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise AsrError(f"ASR response is not JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("text"), str):
        raise AsrError('ASR response must be a JSON object with a string "text" field')
    return doc["text"]
