int slot;

void *store(void *arg) {
  slot = arg + 1;
  return 0;
}

int main() {
  pthread_t t;
  pthread_create(&t, 0, store, 41);
  pthread_join(t, 0);
  return slot;
}
