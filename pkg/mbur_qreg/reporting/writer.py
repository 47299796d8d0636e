import asyncio
import logging
from pathlib import Path
from typing import List, Mapping, Union

import aiofiles

# Set up logging
logger = logging.getLogger(__name__)


async def write_text_async(target_path: Path, text: str):
    """Write one rendered artifact (UTF-8, newline-normalized)"""
    async with aiofiles.open(target_path, 'w', encoding='utf-8', newline='\n') as file:
        await file.write(text)


async def write_bundle_async(out_dir: Union[str, Path], files: Mapping[str, str]) -> List[Path]:
    """
    Write every rendered file of a bundle concurrently.

    ``files`` maps paths relative to ``out_dir`` to their full text; parent
    directories are created before any write starts.
    """
    root = Path(out_dir)
    targets = [root / relative for relative in files]
    for target in targets:
        target.parent.mkdir(parents=True, exist_ok=True)

    await asyncio.gather(*(write_text_async(target, text) for target, text in zip(targets, files.values())))
    logger.info(f"✅ Wrote {len(targets)} files to {root}")
    return targets


def write_bundle(out_dir: Union[str, Path], files: Mapping[str, str]) -> List[Path]:
    return asyncio.run(write_bundle_async(out_dir, files))


def write_text(target_path: Union[str, Path], text: str) -> Path:
    target = Path(target_path)
    if target.parent != Path(''):
        target.parent.mkdir(parents=True, exist_ok=True)
    asyncio.run(write_text_async(target, text))
    return target
