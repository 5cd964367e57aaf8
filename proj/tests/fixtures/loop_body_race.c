int total;

void *bump(void *arg) {
  total = total + 10;
  return 0;
}

int main() {
  pthread_t t;
  int i = 0;
  pthread_create(&t, 0, bump, 0);
  while (i < 2) {
    total = total + 1;
    i = i + 1;
  }
  pthread_join(t, 0);
  return total;
}
