/** Optional runtime dependency: present only when a real model backend
 * is installed. Loaded via dynamic import and duck-typed at the call
 * site, so no type package is required. */
declare module "gliner";
