import os
import json
import logging
import threading
import tempfile
import shutil
from collections import defaultdict
from contextlib import contextmanager
from functools import wraps
from pathlib import Path

import numpy as np
from inireader import reader


def logme(name, level=logging.DEBUG):
    logger = logging.getLogger(name)
    logger.addHandler(logging.StreamHandler())
    logger.setLevel(level)
    return logger


@contextmanager
def tempdir(suffix='', prefix='tmp'):
    tmp = tempfile.mkdtemp(suffix=suffix, prefix=prefix)
    try:
        yield Path(tmp)
    finally:
        shutil.rmtree(tmp)


def unflatten(flattened):
    """Build nested dictionaries from a flattened one, e.g
    policy.kind -> {'policy': {'kind': ...}}
    """
    nested = defaultdict(dict)
    for key, value in flattened.items():
        try:
            toplevel, newkey = [
                k.strip()
                for k in key.split('.', maxsplit=1)
            ]
        except ValueError:
            # nothing to unflatten
            nested[key] = value
            continue
        nested[toplevel][newkey] = value
    return dict(nested)


# configuration

def get_cfg_path():
    if 'MATCHSIMCFGPATH' in os.environ:
        cfgpath = Path(os.environ['MATCHSIMCFGPATH'])
        if cfgpath.exists():
            return cfgpath
    cfgpath = Path('matchsim.cfg')
    if cfgpath.exists():
        return cfgpath
    cfgpath = Path('~/matchsim.cfg').expanduser()
    if cfgpath.exists():
        return cfgpath
    cfgpath = Path(
        os.environ.get('XDG_CONFIG_HOME', '~/.config'),
        'matchsim.cfg'
    ).expanduser()
    if cfgpath.exists():
        return cfgpath


def find_config(something: str) -> Path:
    """Resolve a run configuration: either a path to a json document
    or a name of the [configs] section of the matchsim.cfg file.
    """
    path = Path(something)
    if path.exists():
        return path

    # lookup in the env, then in cwd, then in the home
    cfgpath = get_cfg_path()
    if not cfgpath:
        raise Exception(
            f'could not use nor look up the `{something}` config'
        )

    try:
        cfg = reader(cfgpath)
        return Path(cfg['configs'][something]).expanduser()
    except Exception as exc:
        raise Exception(
            f'could not find the `{something}` entry in the '
            f'[configs] section of the `{cfgpath.resolve()}` '
            f'conf file (cause: {exc.__class__.__name__} -> {exc})'
        )


def cfg_defaults():
    """Run-config defaults from the [defaults] section of the
    matchsim.cfg file (dotted keys are unflattened).
    """
    cfgpath = get_cfg_path()
    if not cfgpath:
        return {}
    cfg = reader(cfgpath)
    try:
        section = dict(cfg['defaults'])
    except KeyError:
        return {}
    return unflatten(section)


# random streams

def rngstream(seed, *key):
    """Counter based split of a master seed: the stream only depends
    on (seed, key), never on the order in which streams are asked for.
    """
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=tuple(key))
    )


# json

def dumps(obj):
    return json.dumps(obj, sort_keys=True)


def errordoc(exc):
    return {
        'error': exc.__class__.__name__,
        'reason': getattr(exc, 'reason', None),
        'message': str(exc)
    }


def onerror(func):
    """Turn any exception into a machine readable json document
    and a non zero exit status."""
    import click

    @wraps(func)
    def wrapper(*a, **k):
        try:
            return func(*a, **k)
        except click.exceptions.Exit:
            raise
        except Exception as err:
            logging.getLogger('matchsim.cli').debug('oops', exc_info=True)
            click.echo(dumps(errordoc(err)))
            raise SystemExit(1)

    return wrapper


# //ism helper

def threadpool(maxthreads):
    L = logging.getLogger('parallel')

    def run(func, argslist):
        count = 0
        threads = []
        errors = []
        L.debug('// run %s %s', func.__name__, len(argslist))

        def guarded(*args):
            try:
                func(*args)
            except Exception as exc:
                errors.append(exc)

        # initial threads
        for count, args in enumerate(argslist, start=1):
            th = threading.Thread(target=guarded, args=args)
            threads.append(th)
            L.debug('// start thread %s', th.name)
            th.daemon = True
            th.start()
            if count == maxthreads:
                break

        while threads:
            for th in threads[:]:
                th.join(1. / maxthreads)
                if not th.is_alive():
                    threads.remove(th)
                    L.debug('// thread %s exited, %s remaining', th.name, len(threads))
                    if count < len(argslist):
                        newth = threading.Thread(target=guarded, args=argslist[count])
                        threads.append(newth)
                        L.debug('// thread %s started', newth.name)
                        newth.daemon = True
                        newth.start()
                        count += 1

        if errors:
            raise errors[0]

    return run
