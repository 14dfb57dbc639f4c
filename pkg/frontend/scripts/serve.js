/** Tiny static server for the compiled UI.
 *
 *   node scripts/serve.js [port]
 *
 * Serves index.html and dist/; open
 *   http://127.0.0.1:<port>/?service=http://127.0.0.1:8171
 * with the moderation service running on that address.
 */

import { createServer } from 'node:http';
import { readFile } from 'node:fs/promises';
import { extname, join, normalize } from 'node:path';
import { fileURLToPath } from 'node:url';

const root = fileURLToPath(new URL('..', import.meta.url));
const port = Number(process.argv[2] ?? 8172);

const MIME = {
  '.html': 'text/html; charset=utf-8',
  '.js': 'text/javascript; charset=utf-8',
  '.css': 'text/css; charset=utf-8',
  '.json': 'application/json',
};

createServer(async (req, res) => {
  const path = new URL(req.url, 'http://x/').pathname;
  const file = path === '/' ? 'index.html' : normalize(path).replace(/^([/\\])+/, '');
  try {
    const body = await readFile(join(root, file));
    res.writeHead(200, { 'Content-Type': MIME[extname(file)] ?? 'application/octet-stream' });
    res.end(body);
  } catch {
    res.writeHead(404, { 'Content-Type': 'text/plain' });
    res.end('not found');
  }
}).listen(port, '127.0.0.1', () => {
  console.log(`moderator UI at http://127.0.0.1:${port}/`);
});
